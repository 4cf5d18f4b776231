// Copyright 2026 The hybridnv Authors
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

#include "hybridnv/runner.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hybridnv/errors.hpp"

namespace {

using namespace hybridnv;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hybridnv_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json bundled_json(const std::string& name) {
  std::ifstream is(bundled_config_dir() / (name + ".json"));
  return Json::parse(is);
}

std::string parse_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

int cli(const std::string& args) {
  const std::string cmd = std::string(HYBRIDNV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Io, DeviceRoundTripIsLossless) {
  const auto p = DeviceParams::reference_cphase();
  const Json j = device_to_json(p);
  EXPECT_DOUBLE_EQ(j.at("omega_a_over_2pi_GHz").get<double>(), 1.4);
  EXPECT_DOUBLE_EQ(j.at("g2_over_2pi_MHz").get<double>(), 20.0);
  const DeviceParams back = device_from_json(Json::parse(j.dump()));
  for (const auto& f : param_fields()) EXPECT_NEAR(back.*f.member, p.*f.member, 1e-12 * p.*f.member) << f.name;
  EXPECT_EQ(back.n_max, p.n_max);
  EXPECT_THROW(device_from_json(Json{{"g7_over_2pi_MHz", 1.0}}), ValidationError);
  EXPECT_THROW(device_from_json(Json{{"g1_over_2pi_MHz", "x"}}), ValidationError);
}

TEST(Io, TimelineRoundTripIsExact) {
  const auto c = compile(DeviceParams::reference_cphase(), {ProtocolId::cphase, CalibrationPolicy::calibrated, {}});
  const Json j = timeline_to_json(c.timeline);
  EXPECT_EQ(timeline_from_json(Json::parse(j.dump())), c.timeline);
  const Json& seg = j.at("segments").at(0);
  for (const char* key : {"duration_ns", "g_over_2pi_GHz", "nve1_freq_over_2pi_GHz", "nve2_freq_over_2pi_GHz", "drives"})
    EXPECT_TRUE(seg.contains(key)) << key;
}

TEST(Io, MatrixAndCalibrationRoundTrip) {
  const Matrix m = Matrix::Random(4, 4);
  EXPECT_EQ(matrix_from_json(Json::parse(matrix_to_json(m).dump())), m);
  CalibrationResult r{2, 0, 1, 15.625, 15.6175, 0.9989, false, "degenerate guess: empty bracket"};
  const auto back = calibration_from_json(Json::parse(calibration_to_json(r).dump()));
  EXPECT_EQ(back.calibrated_ns, r.calibrated_ns);
  EXPECT_EQ(back.message, r.message);
  EXPECT_EQ(back.ok, r.ok);
}

TEST(Config, BundledConfigsLoad) {
  for (const auto& name : bundled_config_names()) {
    const RunConfig c = load_config(name);
    EXPECT_EQ(c.name, name);
    EXPECT_NO_THROW(c.validate());
  }
  EXPECT_EQ(load_config("reference_fast_transfer").protocol.policy, CalibrationPolicy::optimized);
  EXPECT_EQ(load_config("reference_cnot").protocol.id, ProtocolId::cnot);
}

TEST(Config, ErrorsNameTheField) {
  Json j = bundled_json("reference_state_transfer");
  j["colour"] = "blue";
  EXPECT_NE(parse_error(j).find("colour"), std::string::npos);
  j = bundled_json("reference_state_transfer");
  j["device"]["g1_over_2pi_MHz"] = -3.0;
  EXPECT_NE(parse_error(j).find("g1"), std::string::npos);
  j = bundled_json("reference_state_transfer");
  j["theta_grid"] = 4;
  EXPECT_NE(parse_error(j).find("theta_grid"), std::string::npos);
  j = bundled_json("reference_state_transfer");
  j["mode"] = "approximate";
  EXPECT_NE(parse_error(j).find("mode"), std::string::npos);
  j = bundled_json("reference_state_transfer");
  j["protocol"] = "swap";
  EXPECT_FALSE(parse_error(j).empty());
  j = bundled_json("reference_state_transfer");
  j["overrides"] = {{"g_on_over_2pi_MHz", "fast"}};
  EXPECT_NE(parse_error(j).find("overrides.g_on_over_2pi_MHz"), std::string::npos);
  EXPECT_THROW(load_config("no_such_config"), ValidationError);
}

TEST(Config, EchoRoundTrip) {
  const RunConfig c = load_config("reference_cphase");
  const RunConfig back = parse_config(Json::parse(config_to_json(c).dump()));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
}

TEST(Runner, EffectiveModeIsExact) {
  for (const char* name : {"reference_state_transfer", "reference_cphase"}) {
    RunConfig c = load_config(name);
    c.mode = Mode::effective;
    const RunReport r = cmd_run(c);
    EXPECT_GE(r.fidelity.average, 1.0 - 1e-6) << name;
  }
}

TEST(Runner, ReportFilesAndRoundTrip) {
  const fs::path dir = scratch("run");
  RunConfig c = load_config("reference_state_transfer");
  c.output.dir = dir.string();
  c.output.samples = 200;
  const RunReport r = cmd_run(c);
  for (const char* f : {"report.json", "trajectory.csv", "rho_initial.csv", "rho_final.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const Json j = Json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(RunReport::from_json(j).to_json().dump(), j.dump());
  EXPECT_EQ(r.to_json().dump(2) + "\n", slurp(dir / "report.json"));
  EXPECT_EQ(j.at("tool").get<std::string>(), "hybridnv");
  EXPECT_FALSE(j.at("version").get<std::string>().empty());
  EXPECT_EQ(j.at("calibration").size(), 3u);
  // Trajectory: header + one line per sample.
  std::istringstream traj(slurp(dir / "trajectory.csv"));
  std::string header;
  std::getline(traj, header);
  EXPECT_EQ(header.rfind("t_ns,norm,pop_", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(traj, line);) ++rows;
  EXPECT_EQ(rows, 200);
}

TEST(Runner, ConfigEchoMatchesAngularValues) {
  const RunConfig c = load_config("reference_state_transfer");
  const RunReport r = cmd_run(c);
  const Json& dev = r.config.at("device");
  for (const auto& f : param_fields()) {
    const std::string name = f.name;
    const double linear = dev.at(name).get<double>();
    const double angular = r.device_angular.at(name.substr(0, name.find("_over_2pi")) + "_rad_per_ns").get<double>();
    const double input = bundled_json("reference_state_transfer").at("device").at(name).get<double>();
    EXPECT_NEAR(linear, input, 1e-12 * input) << name;
    EXPECT_NEAR(angular / f.to_angular, input, 1e-12 * input) << name;
  }
}

TEST(Runner, RepeatedRunsAreByteIdenticalApartFromTiming) {
  RunConfig c = load_config("reference_state_transfer");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  c.output.dir = a.string();
  cmd_run(c);
  c.output.dir = b.string();
  cmd_run(c);
  Json ja = Json::parse(slurp(a / "report.json")), jb = Json::parse(slurp(b / "report.json"));
  ja.erase("timing");
  jb.erase("timing");
  ja["config"]["output"].erase("dir");
  jb["config"]["output"].erase("dir");
  EXPECT_EQ(ja.dump(), jb.dump());
  for (const char* f : {"trajectory.csv", "rho_initial.csv", "rho_final.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f));
}

TEST(Runner, ThresholdChecks) {
  RunConfig c = load_config("reference_state_transfer");
  c.expect.average_fidelity = 0.5;
  c.expect.fidelity_tolerance = 0.01;
  const RunReport r = cmd_run(c);
  ASSERT_FALSE(r.checks.empty());
  EXPECT_FALSE(r.checks.front().pass);
  EXPECT_FALSE(r.all_checks_pass());
}

TEST(Runner, GateSummaryForGates) {
  const RunReport r = cmd_run(load_config("reference_cnot"));
  ASSERT_TRUE(r.gate.has_value());
  EXPECT_LT(r.gate->metric, 0.05);
  EXPECT_TRUE(r.all_checks_pass());
}

TEST(Runner, CalibrationTable) {
  RunConfig c = load_config("reference_state_transfer");
  c.output.dir = scratch("cal").string();
  const auto rows = cmd_calibrate(c);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].calibrated_ns, 15.625, 0.05);
  EXPECT_NEAR(rows[1].calibrated_ns, 3.40, 0.05);
  const std::string csv = slurp(fs::path(c.output.dir) / "calibration.csv");
  EXPECT_EQ(csv.rfind("step,op,segment,formula_ns,calibrated_ns,transfer,ok,message\n", 0), 0u);
}

TEST(Runner, DumpRho) {
  const Json doc = cmd_dump_rho(load_config("reference_state_transfer"));
  EXPECT_EQ(doc.at("initial").at("labels").size(), 9u);
}

TEST(Cluster, RoundsAndStabilizers) {
  EXPECT_EQ(cmd_cluster({4}, std::nullopt, "").document.at("rounds").size(), 2u);
  EXPECT_EQ(cmd_cluster({2, 2, 2}, std::nullopt, "").document.at("rounds").size(), 6u);
  const auto rep = cmd_cluster({3, 3}, std::nullopt, scratch("cluster").string());
  EXPECT_EQ(rep.document.at("rounds").size(), 4u);
  ASSERT_EQ(rep.stabilizers.size(), 9u);
  for (double k : rep.stabilizers) EXPECT_NEAR(k, 1.0, 1e-12);
  EXPECT_TRUE(fs::exists(fs::temp_directory_path() / ("hybridnv_test_" + std::to_string(::getpid())) / "cluster" /
                         "cluster.json"));
}

TEST(Cluster, OversizeIsScheduleOnly) {
  const auto rep = cmd_cluster({5, 5}, std::nullopt, "");
  EXPECT_FALSE(rep.state_built);
  EXPECT_FALSE(rep.warning.empty());
  EXPECT_EQ(rep.document.at("rounds").size(), 4u);
}

TEST(Cluster, ExtractedGateSource) {
  const auto rep = cmd_cluster({2, 2}, load_config("reference_cphase"), "");
  ASSERT_EQ(rep.stabilizers.size(), 4u);
  for (double k : rep.stabilizers) EXPECT_LE(k, 1.0 + 1e-12);
  EXPECT_EQ(rep.document.at("gate").at("source").get<std::string>(), "reference_cphase");
}

TEST(Cluster, DimsParsing) {
  EXPECT_EQ(parse_dims("3x3"), (std::vector<int>{3, 3}));
  EXPECT_EQ(parse_dims("2,2,2"), (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(parse_dims("4"), (std::vector<int>{4}));
  EXPECT_THROW(parse_dims("3x"), ValidationError);
  EXPECT_THROW(parse_dims("0x2"), ValidationError);
  EXPECT_THROW(parse_dims("ax2"), ValidationError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("run --config reference_state_transfer --assert"), 0);
  EXPECT_EQ(cli("run --config does_not_exist"), 2);
  EXPECT_EQ(cli("run --config reference_state_transfer --theta-grid 3"), 2);
  EXPECT_EQ(cli("run --config reference_state_transfer --mode sideways"), 2);
  EXPECT_EQ(cli("cluster --dims 3x3"), 0);
  EXPECT_EQ(cli("bogus"), 2);
  // Threshold miss only changes the exit code when asserted.
  const fs::path dir = scratch("cli");
  Json j = bundled_json("reference_state_transfer");
  j["expect"]["average_fidelity"] = 0.5;
  j["expect"]["fidelity_tolerance"] = 0.01;
  std::ofstream(dir / "miss.json") << j.dump(2);
  EXPECT_EQ(cli("run --config " + (dir / "miss.json").string()), 0);
  EXPECT_EQ(cli("run --config " + (dir / "miss.json").string() + " --assert"), 4);
  EXPECT_EQ(cli("run --config reference_state_transfer --nmax 3 --out " + (dir / "n3").string()), 0);
  const Json rep = Json::parse(slurp(dir / "n3" / "report.json"));
  EXPECT_EQ(rep.at("config").at("overrides").at("n_max").get<double>(), 3.0);
}

}  // namespace
