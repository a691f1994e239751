#pragma once

#include <cstdint>
#include <vector>

#include "wtgfm/scenario.hpp"
#include "wtgfm/smallsignal.hpp"

namespace wtgfm {

/// Independent scenario runs; output order follows input order.
std::vector<RunResult> run_batch(const std::vector<Config>& configs);
std::vector<RunResult> run_batch_serial(const std::vector<Config>& configs);

/// Random draw satisfying theorem1_conditions: inertias, time
/// constants and susceptances in [0.1, 10], gains in [0.05, 20], equal
/// K_d/K_theta ratios. Every tenth draw has zero turbine stiffness.
/// Deterministic in (seed, index).
LinearParams random_theorem1_params(std::uint64_t seed, std::uint64_t index);

struct SweepSample {
  LinearParams params;
  StabilityVerdict verdict;
  LaSalleReport lasalle;
};

std::vector<SweepSample> stability_sweep(std::size_t n, std::uint64_t seed);
std::vector<SweepSample> stability_sweep_serial(std::size_t n, std::uint64_t seed);

/// Number of OpenMP threads a parallel region would use.
int worker_count();

}  // namespace wtgfm
