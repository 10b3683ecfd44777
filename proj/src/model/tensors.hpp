#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace uniasm {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Box-Muller normal draws truncated at two standard deviations. Self-made so
// initialization streams do not depend on the standard library's
// normal_distribution implementation.
class TruncatedNormal {
public:
    TruncatedNormal(uint64_t seed, double stddev) : rng_(seed), stddev_(stddev) {}

    double next() {
        for (;;) {
            if (have_spare_) {
                have_spare_ = false;
                if (std::abs(spare_) <= 2.0 * stddev_) return spare_;
                continue;
            }
            double u1 = unit();
            double u2 = unit();
            double r = std::sqrt(-2.0 * std::log(u1));
            double z0 = r * std::cos(2.0 * std::numbers::pi * u2) * stddev_;
            spare_ = r * std::sin(2.0 * std::numbers::pi * u2) * stddev_;
            have_spare_ = true;
            if (std::abs(z0) <= 2.0 * stddev_) return z0;
        }
    }

private:
    // (0, 1]: avoids log(0).
    double unit() {
        uint64_t bits = rng_();
        return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    double stddev_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace uniasm
