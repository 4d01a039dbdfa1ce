#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace selflearn {

// Little-endian fixed-width binary primitives for model files.
inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw SlfError("unexpected end of model stream");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline void write_i32(std::ostream& os, std::int32_t v) { write_u32(os, std::uint32_t(v)); }
inline std::int32_t read_i32(std::istream& is) { return std::int32_t(read_u32(is)); }

inline void write_u64(std::ostream& os, std::uint64_t v) {
    write_u32(os, std::uint32_t(v));
    write_u32(os, std::uint32_t(v >> 32));
}

inline std::uint64_t read_u64(std::istream& is) {
    const std::uint64_t lo = read_u32(is);
    const std::uint64_t hi = read_u32(is);
    return lo | (hi << 32);
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    write_u64(os, bits);
}

inline double read_f64(std::istream& is) {
    const std::uint64_t bits = read_u64(is);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

inline void write_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    write_u32(os, bits);
}

inline float read_f32(std::istream& is) {
    const std::uint32_t bits = read_u32(is);
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

inline void write_f32_vec(std::ostream& os, const std::vector<float>& v) {
    write_u64(os, v.size());
    for (const float f : v) write_f32(os, f);
}

inline std::vector<float> read_f32_vec(std::istream& is) {
    const std::uint64_t n = read_u64(is);
    std::vector<float> v(n);
    for (auto& f : v) f = read_f32(is);
    return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    os.write(s.data(), std::streamsize(s.size()));
}

inline std::string read_string(std::istream& is) {
    const std::uint64_t n = read_u64(is);
    std::string s(n, '\0');
    is.read(s.data(), std::streamsize(n));
    if (!is) throw SlfError("unexpected end of model stream");
    return s;
}

} // namespace selflearn
