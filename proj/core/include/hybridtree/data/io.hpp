/*
 * Copyright 2026 The HybridTree Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HYBRIDTREE_DATA_IO_HPP_
#define HYBRIDTREE_DATA_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "hybridtree/data/dataset.hpp"

namespace hybridtree {

struct CsvOptions {
  std::optional<std::string> label_column;
  std::optional<std::string> id_column;
  // Header-only files yield an empty dataset instead of an error.
  bool allow_empty = false;
};

// Numeric CSV with a mandatory header row. Feature columns named `f<k>` keep
// feature id k (when every feature column follows that pattern); otherwise
// feature ids are assigned by column order. Empty fields are missing values.
// Instance ids come from the id column or are assigned 0..n-1.
Dataset parse_csv(const std::filesystem::path& path,
                  const CsvOptions& options = {});

struct LibsvmOptions {
  // Minimum number of feature columns (test files may stop short of the
  // widest training index).
  std::size_t min_features = 0;
  bool allow_empty = false;
};

// "<label> <index>:<value> ..." with strictly increasing 1-based indices.
// Absent entries are 0.0; feature id = index - 1; ids follow row order.
Dataset parse_libsvm(const std::filesystem::path& path,
                     const LibsvmOptions& options = {});

// Writes `id,f<k>...,[y]` with round-trip precision; missing values are empty.
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Dispatches on extension: .csv goes to parse_csv (id column "id" and label
// column "y" when present), anything else to parse_libsvm.
Dataset load_dataset(const std::filesystem::path& path,
                     std::size_t min_features = 0, bool allow_empty = false);

}  // namespace hybridtree

#endif  // HYBRIDTREE_DATA_IO_HPP_
