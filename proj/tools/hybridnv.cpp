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

#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "hybridnv/errors.hpp"
#include "hybridnv/runner.hpp"

namespace {

using namespace hybridnv;

struct Flags {
  std::string config;
  std::string mode;
  int theta_grid = 0;
  int nmax = 0;
  std::string out;
  bool assert_thresholds = false;
};

void add_common(CLI::App* sub, Flags& f, bool needs_config) {
  auto* c = sub->add_option("--config", f.config, "config file path or bundled config name");
  if (needs_config) c->required();
  sub->add_option("--mode", f.mode, "full|effective")->check(CLI::IsMember({"full", "effective"}));
  sub->add_option("--theta-grid", f.theta_grid, "theta grid size M (>= 9)");
  sub->add_option("--nmax", f.nmax, "resonator Fock truncation");
  sub->add_option("--out", f.out, "output directory");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = load_config(f.config);
  if (!f.mode.empty()) c.mode = f.mode == "effective" ? Mode::effective : Mode::full;
  if (f.theta_grid != 0) c.theta_grid = f.theta_grid;
  if (f.nmax != 0) c.protocol.overrides["n_max"] = f.nmax;
  if (!f.out.empty()) c.output.dir = f.out;
  c.validate();
  return c;
}

int do_run(const Flags& f) {
  const RunConfig c = resolve(f);
  const RunReport r = cmd_run(c);
  std::cout << std::setprecision(8);
  std::cout << "protocol " << to_string(c.protocol.id) << " (" << c.name << ")\n";
  std::cout << "average fidelity " << r.fidelity.average << " (min " << r.fidelity.min << ", max " << r.fidelity.max
            << ")\n";
  std::cout << "total time " << r.fidelity.total_time_ns << " ns\n";
  if (r.gate) std::cout << "gate metric " << r.gate->metric << ", leakage " << r.gate->leakage << "\n";
  for (const auto& chk : r.checks) {
    std::cout << (chk.pass ? "ok   " : "MISS ") << chk.name << " " << chk.value << " (expected " << chk.expected
              << " +/- " << chk.tolerance << ")\n";
  }
  if (c.output.dir.empty()) std::cout << r.to_json().dump(2) << "\n";
  return f.assert_thresholds && !r.all_checks_pass() ? 4 : 0;
}

int do_calibrate(const Flags& f) {
  const RunConfig c = resolve(f);
  std::cout << std::setprecision(8);
  for (const auto& r : cmd_calibrate(c)) {
    std::cout << "step " << r.step << " op " << r.op << ": formula " << r.formula_ns << " ns, calibrated "
              << r.calibrated_ns << " ns, transfer " << r.transfer << (r.ok ? "" : "  [failed: " + r.message + "]")
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybridnv: hybrid NV-ensemble / resonator / qubit protocol simulator"};
  app.set_version_flag("--version", HYBRIDNV_VERSION);
  app.require_subcommand(1);
  Flags f;
  std::string dims;
  std::string gate_config;

  auto* run = app.add_subcommand("run", "compile, propagate and score a protocol");
  add_common(run, f, true);
  run->add_flag("--assert", f.assert_thresholds, "exit 4 when an expectation in the config is missed");
  auto* cal = app.add_subcommand("calibrate", "write the calibration table for a protocol");
  add_common(cal, f, true);
  auto* cl = app.add_subcommand("cluster", "schedule c-phase rounds on a lattice");
  cl->add_option("--dims", dims, "lattice extents, e.g. 4, 3x3, 2x2x2")->required();
  cl->add_option("--gate-config", gate_config, "cphase config whose extracted gate replaces the ideal one");
  cl->add_option("--out", f.out, "output directory");
  auto* rho = app.add_subcommand("dump-rho", "write checkpoint density matrices");
  add_common(rho, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return do_run(f);
    if (*cal) return do_calibrate(f);
    if (*cl) {
      std::optional<RunConfig> src;
      if (!gate_config.empty()) src = load_config(gate_config);
      const ClusterReport rep = cmd_cluster(parse_dims(dims), src, f.out);
      if (!rep.warning.empty()) std::cerr << "warning: " << rep.warning << "\n";
      if (f.out.empty()) std::cout << rep.document.dump(2) << "\n";
      return 0;
    }
    if (*rho) {
      const Json doc = cmd_dump_rho(resolve(f));
      if (f.out.empty()) std::cout << doc.dump(2) << "\n";
      return 0;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
