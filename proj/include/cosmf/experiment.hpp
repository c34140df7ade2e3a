// Copyright 2026 The cosmf Authors
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

// Seeded SNR sweep: generate, observe, add noise, solve, score.

#ifndef COSMF_EXPERIMENT_HPP
#define COSMF_EXPERIMENT_HPP

#include "cosmf/io.hpp"
#include "cosmf/scenegen.hpp"
#include "cosmf/solver.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace cosmf {

struct ExperimentConfig {
  SceneConfig scene;
  std::vector<double> snr_db{15.0, 25.0, 35.0, std::numeric_limits<double>::infinity()};
  int trials = 20;
  SolverConfig solver;
  std::string output_dir;  // empty: nothing written
  std::uint64_t seed = 0;
  int threads = 1;         // 0: hardware concurrency

  void validate() const;
};

struct TrialResult {
  double snr_db = 0.0;
  int trial = 0;
  double mse = 0.0;              // mean squared error of the recovered SR image
  double max_pixel_error = 0.0;  // max_j ||x_j - A s_j||_2
  double bound_max = 0.0;        // largest per-pixel certificate bound of the scene
  double objective = 0.0;
  int iterations = 0;
  std::string error;             // non-empty when the trial failed

  bool ok() const { return error.empty(); }
};

struct ExperimentResult {
  std::vector<TrialResult> rows;  // ordered by (snr index, trial)
  std::vector<double> snr_db;
  std::vector<double> mean_mse;   // NaN when every trial at that SNR failed
  std::vector<int> completed;

  std::string csv() const;
  Json summary() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs and writes results.csv and summary.json into config.output_dir.
ExperimentResult run_experiment_to_disk(const ExperimentConfig& config);

ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

}  // namespace cosmf

#endif  // COSMF_EXPERIMENT_HPP
