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

// File formats and JSON serialisation.
//
//   matrices          CSV, one row per line, no header, '.' decimals,
//                     shortest round-trip formatting
//   spatial response  {"L": int, "Lh": int,
//                      "windows": [{"pixels": [0-based ints], "weights": [reals]}]}
//   configs/reports   JSON objects; non-finite reals are written as the
//                     strings "inf" / "-inf" and NaN as null

#ifndef COSMF_IO_HPP
#define COSMF_IO_HPP

#include "cosmf/bounds.hpp"
#include "cosmf/counterexample.hpp"
#include "cosmf/linalg.hpp"
#include "cosmf/model.hpp"
#include "cosmf/scenegen.hpp"
#include "cosmf/solver.hpp"

#include <json.hpp>

#include <string>

namespace cosmf {

using Json = nlohmann::json;

Matrix parse_matrix_csv(const std::string& text, const std::string& source = "<memory>");
std::string format_matrix_csv(const Matrix& m);
Matrix read_matrix(const std::string& path);
void write_matrix(const Matrix& m, const std::string& path);

SpatialResponse spatial_from_json(const Json& j);
Json to_json(const SpatialResponse& g);
SpatialResponse read_spatial(const std::string& path);
void write_spatial(const SpatialResponse& g, const std::string& path);

Json read_json(const std::string& path);
void write_json(const Json& j, const std::string& path);
Json parse_json(const std::string& text, const std::string& source = "<memory>");

void write_text(const std::string& text, const std::string& path);

/// Real from a JSON number or one of "inf", "+inf", "-inf", "infinity".
double json_real(const Json& j, const std::string& what);
Json json_real(double v);

SceneConfig scene_config_from_json(const Json& j);
Json to_json(const SceneConfig& c);
SolverConfig solver_config_from_json(const Json& j);
Json to_json(const SolverConfig& c);

Json to_json(const ValidationReport& r);
Json to_json(const AssumptionReport& r);
Json to_json(const Certificate& c);
Json to_json(const AlignmentReport& r);
Json to_json(const AbundanceErrorReport& r);
Json to_json(const MonteCarloRate& r);
Json to_json(const CounterexampleReport& r);
Json to_json(const Solution& s);
Json scene_sidecar(const GeneratedScene& g, const SceneConfig& config);

Json vector_json(const Vector& v);
Json matrix_json(const Matrix& m);

}  // namespace cosmf

#endif  // COSMF_IO_HPP
