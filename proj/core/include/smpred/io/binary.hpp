#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace smpred::io {

class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All on-disk binary formats are little-endian, 64-bit doubles.

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw FormatError("binary read: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

inline void write_f64(std::ostream& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    write_u64(out, v);
}

inline double read_f64(std::istream& in) {
    const std::uint64_t v = read_u64(in);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    const std::uint64_t n = read_u64(in);
    if (n > (1u << 20)) throw FormatError("binary read: unreasonable string length");
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw FormatError("binary read: truncated file");
    return s;
}

/// Fixed 8-byte magic at the head of every format.
inline void write_magic(std::ostream& out, const char (&magic)[9]) { out.write(magic, 8); }

inline void expect_magic(std::istream& in, const char (&magic)[9], const char* what) {
    char buf[8];
    in.read(buf, 8);
    if (!in || std::memcmp(buf, magic, 8) != 0) {
        throw FormatError(std::string(what) + ": bad magic header");
    }
}

inline void expect_version(std::istream& in, std::uint64_t expected, const char* what) {
    const std::uint64_t v = read_u64(in);
    if (v != expected) {
        throw FormatError(std::string(what) + ": unsupported format version " + std::to_string(v));
    }
}

}  // namespace smpred::io
