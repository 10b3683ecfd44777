#include "common/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "common/errors.hpp"

namespace uniasm {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw RuntimeFault("cannot open file for reading: " + path);
    }
    std::ostringstream out;
    out << in.rdbuf();
    if (in.bad()) {
        throw RuntimeFault("read failed: " + path);
    }
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& data) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw RuntimeFault("cannot open file for writing: " + tmp);
        }
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw RuntimeFault("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw RuntimeFault("rename failed: " + tmp + " -> " + path);
    }
}

uint64_t fnv1a64(const void* data, size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string file_fingerprint(const std::string& path) {
    const std::string data = read_file(path);
    const uint64_t h = fnv1a64(data.data(), data.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace uniasm
