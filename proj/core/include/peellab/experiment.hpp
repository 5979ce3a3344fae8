#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace peellab {

inline constexpr const char* kVersion = "0.1.0";

// Resolved experiment configuration. CLI flags and config-file keys map onto
// these fields one to one; validation happens before any computation.
struct ExperimentConfig {
    std::string experiment; // calibrate | peel | layers | eden | perco | walk-tau | gof

    // law source
    std::string law_path;

    // calibrate
    double beta_lo = 0.0;
    double beta_hi = 0.9;
    std::int64_t cutoff = 100000;

    // simulation knobs
    std::string mode = "plane"; // peel: plane | half-plane
    std::int64_t n_steps = 0;
    std::int64_t r_max = 0;
    double t_max = 0.0;
    double p = 0.5;
    std::vector<std::int64_t> n_grid;
    std::int64_t sigma_l = 0;   // layers: also measure the first-layer time at this l
    std::int64_t step_cap = 0;  // perco: right-censoring cap
    std::int64_t replicas = 1;
    std::int64_t stride = 1;
    bool track_volume = true;

    // walk-tau
    double c_plus = 0.25;
    double c_minus = 0.25;
    double target_b = 0.0;

    // run control
    std::uint64_t master_seed = 0;
    int workers = 0; // 0: hardware concurrency
    std::string out_dir = "out";
    std::string format = "jsonl"; // csv | jsonl
    bool check = false;           // acceptance-gate mode: exit 4 on failed gates
};

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitCalibrationFailed = 3,
    kExitGateFailed = 4,
};

// Validates, runs, writes manifest + per-replica files + aggregate report
// under out_dir. Returns an ExitCode; error text goes to stderr.
int run_experiment(const ExperimentConfig& config);

// throws ConfigError naming the offending key
void validate_config(const ExperimentConfig& config);

// static partition of replica indices over a worker pool; fn(replica) must be
// thread-safe across distinct replicas. Exceptions are rethrown to the caller.
void run_replicas(std::int64_t replicas, int workers,
                  const std::function<void(std::int64_t)>& fn);

} // namespace peellab
