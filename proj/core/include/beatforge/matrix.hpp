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

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace beatforge {

/// Dense row-major real matrix used at module boundaries (features,
/// activations, attention maps).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool empty() const { return data.empty(); }
};

/// Writes `m` as little-endian float32 row-major to `bin_path` and `sidecar`
/// (with `rows`/`cols` filled in unless already present) as JSON next to it.
void write_float32_matrix(const std::filesystem::path& bin_path,
                          const std::filesystem::path& sidecar_path, const Matrix& m,
                          nlohmann::json sidecar);

/// Reads a matrix written by write_float32_matrix. `rows_key`/`cols_key` name
/// the sidecar fields that carry the shape.
Matrix read_float32_matrix(const std::filesystem::path& bin_path,
                           const std::filesystem::path& sidecar_path,
                           const char* rows_key = "rows", const char* cols_key = "cols");

/// Writes a file atomically: content goes to a temporary sibling, then rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const char> bytes);

}  // namespace beatforge
