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

#include "cosmf/error.hpp"
#include "cosmf/experiment.hpp"
#include "cosmf/io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace cosmf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cosmf_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string parse_error_of(const std::string& text) {
  try {
    parse_matrix_csv(text, "m.csv");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("matrix CSV round-trips bit for bit") {
  TempDir dir;
  std::mt19937_64 rng(1);
  Matrix m = oracle::random_uniform(3, 4, rng, -1e3, 1e3);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  m(2, 3) = 123456789.123456789;
  const fs::path p = dir.path / "m.csv";
  write_matrix(m, p.string());
  const Matrix back = read_matrix(p.string());
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(back(i, j) == m(i, j));
}

TEST_CASE("CSV parsing tolerates spaces, CRLF and a trailing blank line") {
  const Matrix m = parse_matrix_csv("1, 2.5\r\n-3,4e-2\n\n");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == 2.5);
  CHECK(m(1, 1) == 0.04);
}

TEST_CASE("CSV errors name their location") {
  const std::string ragged = parse_error_of("1,2\n3,4\n5\n");
  CHECK(ragged.find("line 3") != std::string::npos);
  CHECK(ragged.find("ragged") != std::string::npos);
  const std::string bad = parse_error_of("1,2\n3,x\n");
  CHECK(bad.find("line 2, column 2") != std::string::npos);
  CHECK(parse_error_of("").find("zero rows") != std::string::npos);
  CHECK(parse_error_of("1,,2\n").find("column 2") != std::string::npos);
  try {
    read_matrix("/nonexistent/file.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("spatial response JSON round-trip") {
  TempDir dir;
  std::mt19937_64 rng(4);
  const SpatialResponse g = oracle::random_overlapping_spatial(4, rng);
  const fs::path p = dir.path / "g.json";
  write_spatial(g, p.string());
  const SpatialResponse back = read_spatial(p.string());
  REQUIRE(back.hs_pixels() == g.hs_pixels());
  CHECK(back.sr_pixels() == g.sr_pixels());
  for (Index i = 0; i < g.hs_pixels(); ++i) {
    CHECK(back.window(i).pixels == g.window(i).pixels);
    CHECK(back.window(i).weights == g.window(i).weights);
  }
}

TEST_CASE("spatial response JSON errors") {
  auto code = [](const std::string& text) {
    try {
      spatial_from_json(parse_json(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode{};
  };
  CHECK(code(R"({"L": 2, "Lh": 2, "windows": [{"pixels": [0], "weights": [1]}]})") == ErrorCode::kParse);
  CHECK(code(R"({"L": 2, "Lh": 1, "windows": [{"pixels": [0, 5], "weights": [0.5, 0.5]}]})") ==
        ErrorCode::kInvalidArgument);
  CHECK(code(R"({"L": 2, "Lh": 1, "windows": [{"pixels": [0], "weights": ["a"]}]})") == ErrorCode::kParse);
  CHECK(code(R"({"L": 2, "Lh": 1, "extra": 0, "windows": []})") == ErrorCode::kParse);
  CHECK(code("{not json") == ErrorCode::kParse);
}

TEST_CASE("configs round-trip through JSON") {
  SceneConfig s;
  s.bands = 40;
  s.kernel = KernelKind::kUniform;
  s.kernel_size = 2;
  s.sampling = EndmemberSampling::kUniform;
  s.seed = 0xFFFFFFFFFFFFFFFFULL;
  const SceneConfig s2 = scene_config_from_json(to_json(s));
  CHECK(s2.bands == 40);
  CHECK(s2.kernel == KernelKind::kUniform);
  CHECK(s2.sampling == EndmemberSampling::kUniform);
  CHECK(s2.seed == s.seed);
  CHECK(scene_config_from_json(Json::object()).bands == SceneConfig{}.bands);

  SolverConfig c;
  c.step_rule = StepRule::kFixedLipschitz;
  c.init = InitMode::kRandom;
  c.relative_tolerance = 1e-7;
  const SolverConfig c2 = solver_config_from_json(to_json(c));
  CHECK(c2.step_rule == StepRule::kFixedLipschitz);
  CHECK(c2.init == InitMode::kRandom);
  CHECK(c2.relative_tolerance == 1e-7);

  ExperimentConfig e;
  e.snr_db = {10.0, std::numeric_limits<double>::infinity()};
  e.trials = 3;
  const ExperimentConfig e2 = experiment_config_from_json(parse_json(to_json(e).dump()));
  CHECK(e2.snr_db.size() == 2);
  CHECK(std::isinf(e2.snr_db[1]));
  CHECK(e2.trials == 3);

  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode{};
  };
  CHECK(code([] { scene_config_from_json(parse_json(R"({"bandz": 3})")); }) == ErrorCode::kParse);
  CHECK(code([] { solver_config_from_json(parse_json(R"({"max_outer_iterations": 1.5})")); }) ==
        ErrorCode::kParse);
  CHECK(code([] { experiment_config_from_json(parse_json(R"({"snr_db": ["loud"]})")); }) == ErrorCode::kParse);
}

TEST_CASE("non-finite reals are encoded as strings") {
  CHECK(json_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_real(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(json_real(std::numeric_limits<double>::quiet_NaN()).is_null());
  CHECK(std::isinf(json_real(Json("inf"), "x")));
  CHECK(json_real(Json(2.5), "x") == 2.5);
}

}  // TEST_SUITE

TEST_SUITE("experiment") {

TEST_CASE("noiseless trials recover the image and the run is reproducible") {
  ExperimentConfig c;
  c.snr_db = {std::numeric_limits<double>::infinity()};
  c.trials = 3;
  c.seed = 5;
  const ExperimentResult a = run_experiment(c);
  REQUIRE(a.rows.size() == 3);
  for (const auto& r : a.rows) {
    CHECK(r.ok());
    CHECK(r.mse < 1e-8);
    CHECK(r.max_pixel_error <= r.bound_max);
  }
  CHECK(a.mean_mse[0] < 1e-8);
  c.threads = 2;
  const ExperimentResult b = run_experiment(c);
  CHECK(a.csv() == b.csv());
  CHECK(a.csv().rfind("snr_db,trial,mse,max_pixel_error,bound_max,objective,iters\n", 0) == 0);
}

TEST_CASE("failed trials are recorded, not fatal") {
  ExperimentConfig c;
  c.scene.sampling = EndmemberSampling::kUniform;
  c.scene.max_draws = 1;
  c.snr_db = {20.0};
  c.trials = 2;
  c.solver.max_outer_iterations = 5;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.rows.size() == 2);
  CHECK_FALSE(r.rows[0].ok());
  CHECK(std::isnan(r.rows[0].mse));
  CHECK(r.completed[0] == 0);
  CHECK(r.summary()["failures"].size() == 2);
  ExperimentConfig bad;
  bad.trials = 0;
  CHECK_THROWS_AS(run_experiment(bad), Error);
}

TEST_CASE("experiment outputs are written and re-readable") {
  TempDir dir;
  ExperimentConfig c;
  c.snr_db = {30.0};
  c.trials = 1;
  c.solver.max_outer_iterations = 50;
  c.output_dir = (dir.path / "out").string();
  run_experiment_to_disk(c);
  const Matrix body = parse_matrix_csv([&] {
    std::ifstream in(dir.path / "out" / "results.csv");
    std::string header, rest, line;
    std::getline(in, header);
    while (std::getline(in, line)) rest += line + "\n";
    return rest;
  }());
  CHECK(body.rows() == 1);
  CHECK(body.cols() == 7);
  const Json s = read_json((dir.path / "out" / "summary.json").string());
  CHECK(s["levels"].size() == 1);
}

}  // TEST_SUITE
