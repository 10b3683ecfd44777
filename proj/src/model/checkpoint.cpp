#include "model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "common/errors.hpp"
#include "common/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace uniasm {

namespace {

constexpr char kMagic[4] = {'U', 'A', 'S', 'M'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_u64(std::string& out, uint64_t v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
public:
    Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    bool at_end() const { return pos_ == data_.size(); }

    uint32_t u32() {
        uint32_t v;
        take(&v, sizeof v);
        return v;
    }

    uint64_t u64() {
        uint64_t v;
        take(&v, sizeof v);
        return v;
    }

    std::string bytes(size_t n) {
        if (data_.size() - pos_ < n) fail();
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    void floats(float* dst, size_t count) { take(dst, count * sizeof(float)); }

private:
    void take(void* dst, size_t n) {
        if (data_.size() - pos_ < n) fail();
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }

    [[noreturn]] void fail() const {
        throw ValidationError("truncated checkpoint file: " + path_);
    }

    const std::string& data_;
    const std::string& path_;
    size_t pos_ = 0;
};

void put_tensor(std::string& out, const std::string& name, const float* data, uint32_t rank,
                uint64_t d0, uint64_t d1) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out.append(name);
    put_u32(out, rank);
    put_u64(out, d0);
    if (rank == 2) put_u64(out, d1);
    uint64_t count = rank == 2 ? d0 * d1 : d0;
    out.append(reinterpret_cast<const char*>(data), count * sizeof(float));
}

} // namespace

void save_checkpoint(const std::string& path, const Parameters<float>& params) {
    std::string out;
    out.append(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u32(out, params.config.layers);
    put_u32(out, params.config.heads);
    put_u32(out, params.config.hidden);
    put_u32(out, params.config.intermediate);
    put_u32(out, params.config.max_sl);
    put_u32(out, params.config.vocab);

    auto& mutable_params = const_cast<Parameters<float>&>(params);
    mutable_params.for_each_tensor(
        [&](const std::string& name, Mat<float>& m) {
            put_tensor(out, name, m.data(), 2, static_cast<uint64_t>(m.rows()),
                       static_cast<uint64_t>(m.cols()));
        },
        [&](const std::string& name, Vec<float>& v) {
            put_tensor(out, name, v.data(), 1, static_cast<uint64_t>(v.size()), 0);
        });

    write_file_atomic(path, out);
}

Parameters<float> load_checkpoint(const std::string& path) {
    std::string data = read_file(path);
    Reader in(data, path);

    if (in.bytes(4) != std::string(kMagic, sizeof kMagic)) {
        throw ValidationError("not a checkpoint file (bad magic): " + path);
    }
    uint32_t version = in.u32();
    if (version != kVersion) {
        throw ValidationError("unsupported checkpoint version " + std::to_string(version) +
                              " in " + path);
    }

    ModelConfig config;
    config.layers = in.u32();
    config.heads = in.u32();
    config.hidden = in.u32();
    config.intermediate = in.u32();
    config.max_sl = in.u32();
    config.vocab = in.u32();
    config.validate();

    // Every tensor starts at its expected shape; the file must then fill each
    // exactly once.
    Parameters<float> params = alloc_parameters<float>(config);

    std::set<std::string> remaining;
    std::map<std::string, std::pair<float*, std::pair<uint64_t, uint64_t>>> slots;
    params.for_each_tensor(
        [&](const std::string& name, Mat<float>& m) {
            remaining.insert(name);
            slots[name] = {m.data(),
                           {static_cast<uint64_t>(m.rows()), static_cast<uint64_t>(m.cols())}};
        },
        [&](const std::string& name, Vec<float>& v) {
            remaining.insert(name);
            slots[name] = {v.data(), {static_cast<uint64_t>(v.size()), 0}};
        });

    while (!in.at_end()) {
        uint32_t name_len = in.u32();
        std::string name = in.bytes(name_len);
        auto it = slots.find(name);
        if (it == slots.end()) {
            throw ValidationError("unexpected tensor '" + name + "' in " + path);
        }
        if (remaining.erase(name) == 0) {
            throw ValidationError("duplicate tensor '" + name + "' in " + path);
        }
        uint32_t rank = in.u32();
        auto [expected_d0, expected_d1] = it->second.second;
        uint32_t expected_rank = expected_d1 == 0 ? 1 : 2;
        if (rank != expected_rank) {
            throw ValidationError("tensor '" + name + "' has rank " + std::to_string(rank) +
                                  ", expected " + std::to_string(expected_rank));
        }
        uint64_t d0 = in.u64();
        uint64_t d1 = rank == 2 ? in.u64() : 0;
        if (d0 != expected_d0 || d1 != expected_d1) {
            std::ostringstream msg;
            msg << "tensor '" << name << "' has shape " << d0 << "x" << d1 << ", expected "
                << expected_d0 << "x" << expected_d1;
            throw ValidationError(msg.str());
        }
        uint64_t count = rank == 2 ? d0 * d1 : d0;
        in.floats(it->second.first, count);
    }

    if (!remaining.empty()) {
        throw ValidationError("checkpoint missing tensor '" + *remaining.begin() + "': " + path);
    }
    return params;
}

} // namespace uniasm
