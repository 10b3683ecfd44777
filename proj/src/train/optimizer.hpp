#pragma once

#include <cmath>
#include <cstdint>

#include "common/errors.hpp"
#include "model/params.hpp"

namespace uniasm {

// Adam with bias correction and a linear learning-rate ramp over the first
// `warmup` steps.
template <typename T>
struct AdamState {
    Parameters<T> m;
    Parameters<T> v;
    uint64_t step = 0;

    static AdamState init(const Parameters<T>& params) {
        return AdamState{zeros_like(params), zeros_like(params), 0};
    }
};

template <typename T>
double warmup_lr(double base_lr, uint64_t step, uint64_t warmup) {
    if (warmup == 0) return base_lr;
    double ramp = static_cast<double>(step) / static_cast<double>(warmup);
    return base_lr * (ramp < 1.0 ? ramp : 1.0);
}

template <typename T>
double adam_step(Parameters<T>& params, Parameters<T>& grads, AdamState<T>& state, double base_lr,
                 uint64_t warmup) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;

    ++state.step;
    double lr = warmup_lr<T>(base_lr, state.step, warmup);
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    auto theta = tensor_buffers(params);
    auto g = tensor_buffers(grads);
    auto m = tensor_buffers(state.m);
    auto v = tensor_buffers(state.v);
    if (theta.size() != g.size() || theta.size() != m.size() || theta.size() != v.size()) {
        throw ValidationError("optimizer state does not match parameter shapes");
    }

    for (size_t t = 0; t < theta.size(); ++t) {
        if (theta[t].second != g[t].second || theta[t].second != m[t].second ||
            theta[t].second != v[t].second) {
            throw ValidationError("optimizer tensor size mismatch");
        }
        T* tp = theta[t].first;
        T* gp = g[t].first;
        T* mp = m[t].first;
        T* vp = v[t].first;
        for (size_t i = 0; i < theta[t].second; ++i) {
            T grad = gp[i];
            mp[i] = static_cast<T>(beta1) * mp[i] + static_cast<T>(1.0 - beta1) * grad;
            vp[i] = static_cast<T>(beta2) * vp[i] + static_cast<T>(1.0 - beta2) * grad * grad;
            T m_hat = mp[i] / static_cast<T>(bc1);
            T v_hat = vp[i] / static_cast<T>(bc2);
            tp[i] -= static_cast<T>(lr) * m_hat / (std::sqrt(v_hat) + static_cast<T>(eps));
        }
    }
    return lr;
}

} // namespace uniasm
