#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace selflearn {

// FNV-1a 64-bit, used for model and report checksums.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[std::size_t(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::string file_checksum(const std::string& path);

} // namespace selflearn
