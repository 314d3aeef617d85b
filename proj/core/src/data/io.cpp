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

#include "hybridtree/data/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

// Splits one RFC-4180 record. Quoted fields may contain commas and doubled
// quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && trim(cur).empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(cur));
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset parse_csv(const std::filesystem::path& path,
                  const CsvOptions& options) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_record(line, line_no);
      break;
    }
  }
  if (header.empty()) {
    if (options.allow_empty) return Dataset();
    throw ParseError("no rows", 0);
  }
  if (header[0].size() >= 3 &&
      header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0].erase(0, 3);
  }
  for (auto& h : header) h = std::string(trim(h));

  auto find_column = [&](const std::optional<std::string>& name)
      -> std::optional<std::size_t> {
    if (!name) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      throw ParseError("header has no column \"" + *name + "\"", 1);
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto label_col = find_column(options.label_column);
  const auto id_col = find_column(options.id_column);

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col && c != id_col) feature_cols.push_back(c);
  }
  std::vector<FeatureId> feature_ids;
  bool named = !feature_cols.empty();
  for (std::size_t c : feature_cols) {
    const std::string& h = header[c];
    unsigned long id = 0;
    if (h.size() < 2 || h[0] != 'f') {
      named = false;
      break;
    }
    auto [ptr, ec] = std::from_chars(h.data() + 1, h.data() + h.size(), id);
    if (ec != std::errc() || ptr != h.data() + h.size()) {
      named = false;
      break;
    }
    feature_ids.push_back(static_cast<FeatureId>(id));
  }
  if (!named) {
    feature_ids.clear();
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      feature_ids.push_back(static_cast<FeatureId>(k));
    }
  }

  std::vector<InstanceId> ids;
  std::vector<std::vector<double>> columns(feature_cols.size());
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    if (id_col) {
      std::string_view raw = trim(fields[*id_col]);
      InstanceId id = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), id);
      if (ec != std::errc() || ptr != raw.data() + raw.size() || raw.empty()) {
        throw ParseError("invalid instance id \"" + std::string(raw) + "\"",
                         line_no);
      }
      ids.push_back(id);
    } else {
      ids.push_back(static_cast<InstanceId>(ids.size()));
    }
    if (label_col) {
      auto y = to_double(fields[*label_col]);
      if (!y) {
        throw ParseError("label column \"" + header[*label_col] +
                             "\" is not numeric: \"" + fields[*label_col] +
                             "\"",
                         line_no);
      }
      labels.push_back(*y);
    }
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const std::string& raw = fields[feature_cols[k]];
      if (trim(raw).empty()) {
        columns[k].push_back(kMissing);
        continue;
      }
      auto v = to_double(raw);
      if (!v) {
        throw ParseError("column \"" + header[feature_cols[k]] +
                             "\" is not numeric (\"" + raw +
                             "\"); categorical columns must be pre-encoded",
                         line_no);
      }
      columns[k].push_back(*v);
    }
  }
  if (ids.empty() && !options.allow_empty) throw ParseError("no rows", 0);

  std::optional<std::vector<double>> maybe_labels;
  if (label_col) maybe_labels = std::move(labels);
  return Dataset(std::move(ids), std::move(feature_ids), std::move(columns),
                 std::move(maybe_labels));
}

Dataset parse_libsvm(const std::filesystem::path& path,
                     const LibsvmOptions& options) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;

  struct Entry {
    std::size_t row;
    std::size_t index;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> labels;
  std::size_t width = options.min_features;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    const std::size_t row = labels.size();

    auto next_token = [&rest]() {
      while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) {
        rest.remove_prefix(1);
      }
      std::size_t end = rest.find_first_of(" \t");
      std::string_view tok = rest.substr(0, end);
      rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      return tok;
    };

    std::string_view label_tok = next_token();
    auto y = to_double(label_tok);
    if (!y) {
      throw ParseError("invalid label \"" + std::string(label_tok) + "\"",
                       line_no);
    }
    labels.push_back(*y);

    std::size_t prev = 0;
    for (std::string_view tok = next_token(); !tok.empty();
         tok = next_token()) {
      std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected index:value, found \"" + std::string(tok) +
                             "\"",
                         line_no);
      }
      std::size_t index = 0;
      auto idx_part = tok.substr(0, colon);
      auto [ptr, ec] = std::from_chars(idx_part.data(),
                                       idx_part.data() + idx_part.size(), index);
      if (ec != std::errc() || ptr != idx_part.data() + idx_part.size() ||
          index == 0) {
        throw ParseError("invalid feature index \"" + std::string(idx_part) +
                             "\" (indices are 1-based)",
                         line_no);
      }
      if (index <= prev) {
        throw ParseError("feature indices must be strictly increasing (" +
                             std::to_string(index) + " after " +
                             std::to_string(prev) + ")",
                         line_no);
      }
      auto v = to_double(tok.substr(colon + 1));
      if (!v) {
        throw ParseError("invalid value \"" +
                             std::string(tok.substr(colon + 1)) +
                             "\" for index " + std::to_string(index),
                         line_no);
      }
      prev = index;
      width = std::max(width, index);
      entries.push_back({row, index - 1, *v});
    }
  }
  if (labels.empty() && !options.allow_empty) throw ParseError("no rows", 0);

  const std::size_t n = labels.size();
  std::vector<std::vector<double>> columns(width, std::vector<double>(n, 0.0));
  for (const Entry& e : entries) columns[e.index][e.row] = e.value;
  std::vector<InstanceId> ids(n);
  std::vector<FeatureId> feature_ids(width);
  for (std::size_t r = 0; r < n; ++r) ids[r] = r;
  for (std::size_t c = 0; c < width; ++c) {
    feature_ids[c] = static_cast<FeatureId>(c);
  }
  return Dataset(std::move(ids), std::move(feature_ids), std::move(columns),
                 std::move(labels));
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "id";
  for (FeatureId f : data.feature_ids()) out << ",f" << f;
  if (data.has_labels()) out << ",y";
  out << '\n';
  for (std::size_t r = 0; r < data.num_instances(); ++r) {
    out << data.instance_ids()[r];
    for (std::size_t c = 0; c < data.num_features(); ++c) {
      out << ',';
      double v = data.value(r, c);
      if (!is_missing(v)) out << format_double(v);
    }
    if (data.has_labels()) out << ',' << format_double(data.labels()[r]);
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path,
                     std::size_t min_features, bool allow_empty) {
  if (path.extension() == ".csv") {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) {
      if (allow_empty) return Dataset();
      throw ParseError("no rows", 0);
    }
    auto header = split_record(line, 1);
    CsvOptions options;
    options.allow_empty = allow_empty;
    for (auto& h : header) {
      auto name = trim(h);
      if (name == "id") options.id_column = "id";
      if (name == "y") options.label_column = "y";
    }
    return parse_csv(path, options);
  }
  LibsvmOptions options;
  options.min_features = min_features;
  options.allow_empty = allow_empty;
  return parse_libsvm(path, options);
}

}  // namespace hybridtree
