// thermovisc: run, verify and refinement studies for the thermoviscoelastic damage/phase-field scheme.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "thermovisc/config.hpp"
#include "thermovisc/convergence.hpp"
#include "thermovisc/io.hpp"
#include "thermovisc/verification.hpp"

using namespace thermovisc;

namespace {

int cmd_run(const std::string& cfg_path, const std::string& out_override) {
  const RunConfig c = load_config(cfg_path);
  const RunSetup rs = make_run_setup(c);
  const Trajectory tr = run_simulation(rs.pb, rs.init, rs.src, rs.T, rs.tau);
  const VerificationReport rep = verify_trajectory(rs.pb, tr);
  const std::string dir = out_override.empty() ? resolve_output_dir(c) : out_override;
  write_outputs(dir, c, rs.pb, tr, rep);
  std::cout << "steps: " << tr.n_steps() << "  output: " << dir << "\n" << rep.table();
  return rep.pass() ? 0 : 1;
}

int cmd_verify(const std::string& traj_path, const std::string& out_override) {
  const StoredRun run = read_trajectory(traj_path);
  const Problem pb = build_problem(run.config);
  const VerificationReport rep = verify_trajectory(pb, run.trajectory);
  if (!out_override.empty()) write_report(out_override, rep);
  std::cout << rep.table();
  return rep.pass() ? 0 : 1;
}

int cmd_study(const std::string& cfg_path, const std::string& kind_override, const std::string& out_override) {
  const RunConfig c = load_config(cfg_path);
  const std::string kind = kind_override.empty() ? c.study.kind : kind_override;
  const RunSetup rs = make_run_setup(c);
  StudyTable table;
  if (kind == "tau") {
    table = tau_refinement_study(rs, c.study.levels);
  } else if (kind == "delta") {
    table = delta_study(rs, c.study.deltas);
  } else if (kind == "regularization") {
    table = regularization_study(rs, c.study.nus, c.study.Ms);
  } else {
    std::cerr << "unknown study kind: " << kind << "\n";
    return 2;
  }
  const std::string dir = out_override.empty() ? resolve_output_dir(c) : out_override;
  std::filesystem::create_directories(dir);
  std::ofstream f(dir + "/study_" + kind + ".dat");
  if (!f) throw std::runtime_error("cannot write " + dir + "/study_" + kind + ".dat");
  f << table.to_text('\t');
  std::cout << table.to_text('\t');
  return table.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit FE scheme for thermoviscoelastic damage and phase transitions, with verification"};
  app.require_subcommand(1);

  std::string cfg, traj, out, kind;
  auto* run = app.add_subcommand("run", "simulate, verify and write outputs");
  run->add_option("config", cfg, "configuration file")->required();
  run->add_option("-o,--output", out, "output directory (overrides config and THERMOVISC_OUTPUT_DIR)");

  auto* verify = app.add_subcommand("verify", "verify a stored trajectory");
  verify->add_option("trajectory", traj, "trajectory.txt written by run")->required();
  verify->add_option("-o,--output", out, "directory for report.txt and report.kv");

  auto* study = app.add_subcommand("study", "refinement, delta or regularization study");
  study->add_option("config", cfg, "configuration file")->required();
  study->add_option("-k,--kind", kind, "tau | delta | regularization (default: [study] kind)");
  study->add_option("-o,--output", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return cmd_run(cfg, out);
    if (*verify) return cmd_verify(traj, out);
    if (*study) return cmd_study(cfg, kind, out);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
