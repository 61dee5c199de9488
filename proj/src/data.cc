//
// Copyright 2026 The ObjPert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "objpert/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace objpert {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  size_t pos = 0;
  try {
    *out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
    ++pos;
  }
  return pos == s.size();
}

std::mt19937_64 MakeShuffleEngine(const RngSpec& rng) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng.seed),
                    static_cast<std::uint32_t>(rng.seed >> 32),
                    static_cast<std::uint32_t>(rng.shuffle_stream),
                    static_cast<std::uint32_t>(rng.shuffle_stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RawTable LoadCsv(const std::string& path, const std::string& label_column,
                 Task task, const std::set<std::string>& categorical_columns) {
  (void)task;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("LoadCsv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("LoadCsv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitLine(line);
  const size_t ncols = header.size();
  long label_idx = -1;
  for (size_t c = 0; c < ncols; ++c) {
    if (header[c] == label_column) label_idx = static_cast<long>(c);
  }
  if (label_idx < 0) {
    throw std::runtime_error("LoadCsv: missing label column '" + label_column +
                             "'");
  }
  for (const auto& cat : categorical_columns) {
    if (std::find(header.begin(), header.end(), cat) == header.end()) {
      throw std::runtime_error("LoadCsv: declared categorical column '" + cat +
                               "' not in header");
    }
  }

  std::vector<std::vector<std::string>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != ncols) {
      throw std::runtime_error("LoadCsv: ragged row at line " +
                               std::to_string(line_no) + " (" +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(ncols) + ")");
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw std::runtime_error("LoadCsv: no data rows");

  // Collect categorical levels (sorted for a deterministic encoding).
  std::map<size_t, std::vector<std::string>> levels;
  for (size_t c = 0; c < ncols; ++c) {
    if (static_cast<long>(c) == label_idx) continue;
    if (categorical_columns.count(header[c]) == 0) continue;
    std::set<std::string> uniq;
    for (const auto& row : rows) uniq.insert(row[c]);
    levels[c] = std::vector<std::string>(uniq.begin(), uniq.end());
  }

  std::vector<std::string> feature_names;
  for (size_t c = 0; c < ncols; ++c) {
    if (static_cast<long>(c) == label_idx) continue;
    if (levels.count(c)) {
      for (const auto& lv : levels[c]) {
        feature_names.push_back(header[c] + "=" + lv);
      }
    } else {
      feature_names.push_back(header[c]);
    }
  }

  RawTable table;
  table.feature_names = feature_names;
  table.features.resize(static_cast<long>(rows.size()),
                        static_cast<long>(feature_names.size()));
  table.labels.resize(static_cast<long>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    long f = 0;
    for (size_t c = 0; c < ncols; ++c) {
      const std::string& cell = rows[r][c];
      if (static_cast<long>(c) == label_idx) {
        double v;
        if (!ParseDouble(cell, &v)) {
          throw std::runtime_error("LoadCsv: non-numeric label at line " +
                                   std::to_string(r + 2));
        }
        table.labels[static_cast<long>(r)] = v;
        continue;
      }
      if (levels.count(c)) {
        for (const auto& lv : levels[c]) {
          table.features(static_cast<long>(r), f++) = (cell == lv) ? 1.0 : 0.0;
        }
      } else {
        double v;
        if (!ParseDouble(cell, &v)) {
          throw std::runtime_error(
              "LoadCsv: non-numeric cell '" + cell + "' in column '" +
              header[c] + "' at line " + std::to_string(r + 2) +
              " (declare the column categorical to one-hot encode it)");
        }
        table.features(static_cast<long>(r), f++) = v;
      }
    }
  }
  return table;
}

Dataset NormalizeFeatures(const RawTable& raw, NormalizeMode mode, Task task,
                          std::optional<std::pair<double, double>> label_bounds) {
  Dataset ds;
  ds.task = task;
  ds.d = static_cast<int>(raw.features.cols());
  const long n = raw.features.rows();

  double lo = 0, hi = 0;
  if (task == Task::kRegression) {
    lo = label_bounds ? label_bounds->first : raw.labels.minCoeff();
    hi = label_bounds ? label_bounds->second : raw.labels.maxCoeff();
    if (hi < lo) throw std::invalid_argument("label bounds out of order");
    if (hi > lo) {
      ds.label_scale = (hi - lo) / 2.0;
      ds.label_offset = (hi + lo) / 2.0;
    }
  }

  ds.examples.reserve(n);
  for (long i = 0; i < n; ++i) {
    Example ex;
    ex.x = raw.features.row(i).transpose();
    const double norm = ex.x.norm();
    if (mode == NormalizeMode::kUnitBall) {
      if (norm > 1.0) ex.x /= norm;
    } else {
      if (norm == 0) {
        throw std::runtime_error(
            "paper_adult normalization undefined for zero-norm row " +
            std::to_string(i));
      }
      ex.x /= norm * norm;
      if (ex.x.norm() > 1.0 + 1e-12) {
        throw std::runtime_error(
            "paper_adult normalization violates ||x|| <= 1 at row " +
            std::to_string(i) + " (row norm " + std::to_string(norm) + " < 1)");
      }
    }
    const double y = raw.labels[i];
    if (task == Task::kBinaryClassification) {
      if (y != 0.0 && y != 1.0) {
        throw std::runtime_error("classification label must be 0 or 1, got " +
                                 std::to_string(y) + " at row " +
                                 std::to_string(i));
      }
      ex.y = y;
    } else {
      ex.y = ds.label_scale > 0 ? (y - ds.label_offset) / ds.label_scale : 0.0;
      if (std::abs(ex.y) > 1.0 + 1e-12) {
        throw std::runtime_error("regression label outside declared bounds at row " +
                                 std::to_string(i));
      }
      ex.y = std::clamp(ex.y, -1.0, 1.0);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::pair<Dataset, Dataset> Split(const Dataset& ds, double test_fraction,
                                  const RngSpec& rng) {
  if (!(test_fraction > 0 && test_fraction < 1)) {
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  }
  const long n = static_cast<long>(ds.examples.size());
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto eng = MakeShuffleEngine(rng);
  std::shuffle(idx.begin(), idx.end(), eng);
  const long test_n = std::lround(test_fraction * static_cast<double>(n));
  Dataset train = ds;
  Dataset test = ds;
  train.examples.clear();
  test.examples.clear();
  for (long i = 0; i < n; ++i) {
    (i < test_n ? test : train).examples.push_back(ds.examples[idx[i]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace objpert
