/// @file io.hpp
/// @brief Output files and the self-contained trajectory format.
///
/// All floating-point output uses 17 significant digits so that reading a file back
/// reproduces the doubles exactly.
#pragma once

#include <string>
#include <vector>

#include "thermovisc/config.hpp"
#include "thermovisc/stepper.hpp"
#include "thermovisc/verification.hpp"

namespace thermovisc {

/// Trajectory together with the configuration that produced it.
struct StoredRun {
  RunConfig config;
  Trajectory trajectory;
};

void write_trajectory(const std::string& path, const RunConfig& c, const Trajectory& tr);
StoredRun read_trajectory(const std::string& path);

/// Per step: t, tau, total energy, min/max theta, min/max chi, iteration counts, M.
void write_timeseries(const std::string& path, const Problem& pb, const Trajectory& tr);

struct TimeseriesRow {
  std::vector<double> values;
};
/// Column names and rows of a timeseries.dat file.
std::pair<std::vector<std::string>, std::vector<TimeseriesRow>> read_timeseries(const std::string& path);

/// Nodal snapshot: node x [y] theta u... v... chi xi
void write_snapshot(const std::string& path, const Mesh& m, const State& s);

/// Writes timeseries.dat, snapshot_XXXXXX.dat, trajectory.txt, config.ini, report.txt, report.kv into dir.
void write_outputs(const std::string& dir, const RunConfig& c, const Problem& pb, const Trajectory& tr,
                   const VerificationReport& rep);

void write_report(const std::string& dir, const VerificationReport& rep);

}  // namespace thermovisc
