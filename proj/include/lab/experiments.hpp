#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lab/config.hpp"

namespace lab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
};

struct RunResult {
    bool pass = false;
    std::vector<CheckResult> checks;
    std::map<std::string, double> headline;  // scalar summary row for sweeps
    std::filesystem::path dir;
};

// Executes the experiment named by [experiment] kind; writes manifest.json,
// data files and summary.json under out_dir. Seed resolution order:
// LAB_SEED environment variable, then [experiment] seed, then 0.
RunResult run_experiment(const ConfigFile& config, const std::filesystem::path& out_dir,
                         unsigned jobs);

// Runs the experiment once per axis value (axis in {N, epsilon, dt}),
// writing each run under out_dir/<axis>_<value>/ and a combined CSV at
// out_dir/sweep.csv. An empty value list yields a header-only CSV.
struct SweepResult {
    bool pass = true;
    std::filesystem::path csv;
    std::vector<RunResult> runs;
};
SweepResult sweep_experiment(const ConfigFile& config, const std::string& axis,
                             const std::vector<double>& values,
                             const std::filesystem::path& out_dir, unsigned jobs);

}  // namespace lab
