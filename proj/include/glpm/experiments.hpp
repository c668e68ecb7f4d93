#pragma once

#include "glpm/config.hpp"

namespace glpm {

// Executes the configured experiment pipeline and writes its artifacts
// (report.json, CSV tables, snapshot, manifest.json) under the resolved
// output directory. Returns the report. Throws convergence_error when a
// required solve does not converge.
nlohmann::json run_experiment(const RunConfig& cfg);

// Runs the pipeline once per value of `axis` (one of p, m, T, R, h, L) in
// its own subdirectory, up to `threads` runs in parallel, and aggregates
// key scalars into sweep.csv. Per-run failures are recorded in the table
// and the first failure is rethrown after the sweep completes.
nlohmann::json sweep_experiment(const RunConfig& base, const std::string& axis,
                                const std::vector<double>& values, int threads = 1);

} // namespace glpm
