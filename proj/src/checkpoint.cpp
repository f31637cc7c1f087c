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

#include "qgcnn/checkpoint.hpp"

#include <cstdint>
#include <fstream>

#include "qgcnn/errors.hpp"
#include "qgcnn/serialize.hpp"

namespace qgcnn {

namespace {

constexpr char kCheckpointMagic[4] = {'Q', 'G', 'C', 'N'};
constexpr std::uint32_t kCheckpointVersion = 1;

} // namespace

void save_checkpoint(const Eigen::VectorXd& params, const std::filesystem::path& path) {
    if (params.size() == 0) {
        throw UsageError("cannot save an empty parameter vector");
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open \"" + path.string() + "\" for writing");
    }
    io::write_bytes(os, kCheckpointMagic, 4);
    io::write_u32(os, kCheckpointVersion);
    io::write_u32(os, static_cast<std::uint32_t>(params.size()));
    io::write_u32(os, 0); // reserved
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        io::write_f64(os, params[i]);
    }
    os.flush();
    if (!os) {
        throw IoError("write to \"" + path.string() + "\" failed");
    }
}

Eigen::VectorXd load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open \"" + path.string() + "\" for reading");
    }
    std::uint64_t offset = 0;
    io::expect_magic(is, kCheckpointMagic, offset);
    const std::uint32_t version = io::read_u32(is, offset, "version");
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                          " at offset 4 (expected " + std::to_string(kCheckpointVersion) +
                          ")");
    }
    const std::uint32_t count = io::read_u32(is, offset, "parameter count");
    if (count == 0 || count > (1u << 24)) {
        throw FormatError("implausible parameter count " + std::to_string(count) +
                          " at offset 8");
    }
    (void)io::read_u32(is, offset, "reserved word");
    Eigen::VectorXd params(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        params[i] = io::read_f64(is, offset, "parameter");
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after the last parameter at offset " +
                          std::to_string(offset));
    }
    return params;
}

} // namespace qgcnn
