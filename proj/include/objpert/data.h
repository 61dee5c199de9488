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

#ifndef OBJPERT_DATA_H_
#define OBJPERT_DATA_H_

#include <Eigen/Core>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "objpert/glm_loss.h"
#include "objpert/solver.h"

namespace objpert {

enum class Task { kBinaryClassification, kRegression };

// Parsed CSV after one-hot encoding of declared categorical columns.
// Format: comma-separated, UTF-8, first row header, decimal point '.',
// no quoting of numeric fields.
struct RawTable {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // n
  std::vector<std::string> feature_names;
};

RawTable LoadCsv(const std::string& path, const std::string& label_column,
                 Task task,
                 const std::set<std::string>& categorical_columns = {});

enum class NormalizeMode {
  kUnitBall,    // x := x / max(1, ||x||)
  kPaperAdult,  // x := x / ||x||^2, then assert ||x|| <= 1
};

// Preprocessed dataset: every ||x|| <= 1 + 1e-12, labels in {0,1}
// (classification) or [-1,1] (regression). Regression labels are affinely
// rescaled; original = encoded * label_scale + label_offset.
struct Dataset {
  std::vector<Example> examples;
  int d = 0;
  Task task = Task::kBinaryClassification;
  double label_scale = 1.0;
  double label_offset = 0.0;
};

// label_bounds, when given, declares the regression label range used for the
// affine rescale (wine-quality style 1..10); defaults to the data min/max.
Dataset NormalizeFeatures(
    const RawTable& raw, NormalizeMode mode, Task task,
    std::optional<std::pair<double, double>> label_bounds = std::nullopt);

// Deterministic shuffle per seed, disjoint cover; the test side gets
// round(n * test_fraction) rows.
std::pair<Dataset, Dataset> Split(const Dataset& ds, double test_fraction,
                                  const RngSpec& rng);

}  // namespace objpert

#endif  // OBJPERT_DATA_H_
