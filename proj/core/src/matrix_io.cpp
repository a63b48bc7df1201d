// Copyright 2026 The beatforge Authors.
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

#include "beatforge/matrix.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "beatforge/errors.hpp"

namespace beatforge {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void write_file_atomic(const std::filesystem::path& path, std::span<const char> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw Error(ErrorCode::kIo, "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_float32_matrix(const std::filesystem::path& bin_path,
                          const std::filesystem::path& sidecar_path, const Matrix& m,
                          nlohmann::json sidecar) {
  std::vector<float> values(m.data.begin(), m.data.end());
  write_file_atomic(bin_path, {reinterpret_cast<const char*>(values.data()),
                               values.size() * sizeof(float)});
  if (!sidecar.contains("rows") && !sidecar.contains("n_frames")) {
    sidecar["rows"] = m.rows;
  }
  if (!sidecar.contains("cols") && !sidecar.contains("n_bands")) {
    sidecar["cols"] = m.cols;
  }
  const std::string text = sidecar.dump(2) + "\n";
  write_file_atomic(sidecar_path, {text.data(), text.size()});
}

Matrix read_float32_matrix(const std::filesystem::path& bin_path,
                           const std::filesystem::path& sidecar_path, const char* rows_key,
                           const char* cols_key) {
  std::ifstream side(sidecar_path);
  if (!side) {
    throw Error(ErrorCode::kIo, "cannot open " + sidecar_path.string());
  }
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptFile, sidecar_path.string() + ": " + e.what());
  }
  Matrix m(meta.at(rows_key).get<std::size_t>(), meta.at(cols_key).get<std::size_t>());

  std::ifstream in(bin_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + bin_path.string());
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != m.data.size() * sizeof(float)) {
    throw Error(ErrorCode::kCorruptFile,
                bin_path.string() + ": byte length does not match sidecar shape");
  }
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    float v = 0.0f;
    std::memcpy(&v, bytes.data() + i * sizeof(float), sizeof(float));
    m.data[i] = v;
  }
  return m;
}

}  // namespace beatforge
