// Copyright 2026 The qgcnn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "qgcnn/errors.hpp"

namespace qgcnn::io {

// Little-endian primitives shared by the dataset and checkpoint formats.
// Values are assembled byte by byte, so the host byte order never leaks
// into a file. Readers carry a running offset for precise error messages.

inline void write_bytes(std::ostream& os, const void* data, std::size_t len) {
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    write_bytes(os, b, 4);
}

inline void write_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(os, bits);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    write_u32(os, static_cast<std::uint32_t>(v & 0xFFFFFFFFULL));
    write_u32(os, static_cast<std::uint32_t>(v >> 32));
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

inline void read_bytes(std::istream& is, void* out, std::size_t len,
                       std::uint64_t& offset, const char* what) {
    is.read(static_cast<char*>(out), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(is.gcount()) != len) {
        throw FormatError(std::string("truncated file: expected ") + what +
                          " at offset " + std::to_string(offset));
    }
    offset += len;
}

inline std::uint8_t read_u8(std::istream& is, std::uint64_t& offset, const char* what) {
    unsigned char b;
    read_bytes(is, &b, 1, offset, what);
    return b;
}

inline std::uint32_t read_u32(std::istream& is, std::uint64_t& offset, const char* what) {
    unsigned char b[4];
    read_bytes(is, b, 4, offset, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline float read_f32(std::istream& is, std::uint64_t& offset, const char* what) {
    const std::uint32_t bits = read_u32(is, offset, what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline std::uint64_t read_u64(std::istream& is, std::uint64_t& offset, const char* what) {
    const std::uint64_t lo = read_u32(is, offset, what);
    const std::uint64_t hi = read_u32(is, offset, what);
    return lo | (hi << 32);
}

inline double read_f64(std::istream& is, std::uint64_t& offset, const char* what) {
    const std::uint64_t bits = read_u64(is, offset, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

/// Reads and checks a 4-byte magic tag at the current offset.
inline void expect_magic(std::istream& is, const char magic[4], std::uint64_t& offset) {
    char got[4];
    read_bytes(is, got, 4, offset, "magic");
    if (std::memcmp(got, magic, 4) != 0) {
        throw FormatError(std::string("bad magic at offset 0: expected \"") +
                          std::string(magic, 4) + "\", got \"" + std::string(got, 4) + "\"");
    }
}

} // namespace qgcnn::io
