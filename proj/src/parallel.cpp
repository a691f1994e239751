#include "wtgfm/parallel.hpp"

#include <exception>
#include <random>

#include <omp.h>

namespace wtgfm {

std::vector<RunResult> run_batch_serial(const std::vector<Config>& configs) {
  std::vector<RunResult> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(run_scenario(c));
  return out;
}

std::vector<RunResult> run_batch(const std::vector<Config>& configs) {
  const long n = static_cast<long>(configs.size());
  std::vector<RunResult> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    try {
      out[k] = run_scenario(configs[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

LinearParams random_theorem1_params(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> phys(0.1, 10.0);
  std::uniform_real_distribution<double> gain(0.05, 20.0);
  std::uniform_real_distribution<double> speed(0.7, 1.2);
  LinearParams p;
  p.j_g = phys(rng);
  p.j_wt = phys(rng);
  p.c_dc = phys(rng);
  p.t_g = phys(rng);
  p.b_g = phys(rng);
  p.b_msc = phys(rng);
  p.k_g = gain(rng);
  p.omega_0 = 1.0;
  p.omega_del = speed(rng);
  p.k_theta_gsc = gain(rng);
  p.k_d_gsc = gain(rng);
  p.k_theta_msc = gain(rng);
  p.k_d_msc = p.k_d_gsc * p.k_theta_msc / p.k_theta_gsc;
  p.k_omega = gain(rng);
  p.k_beta = gain(rng);
  p.k_p = gain(rng);
  if (index % 10 == 9) {
    p.k_omega = 0.0;
    p.k_p = 0.0;
  }
  return p;
}

namespace {

SweepSample evaluate(std::uint64_t seed, std::uint64_t i) {
  SweepSample s;
  s.params = random_theorem1_params(seed, i);
  const auto model = build_model(s.params);
  s.verdict = stability_verdict(model);
  s.lasalle = lasalle_verify(model);
  return s;
}

}  // namespace

std::vector<SweepSample> stability_sweep_serial(std::size_t n, std::uint64_t seed) {
  std::vector<SweepSample> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = evaluate(seed, i);
  return out;
}

std::vector<SweepSample> stability_sweep(std::size_t n, std::uint64_t seed) {
  std::vector<SweepSample> out(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) out[i] = evaluate(seed, static_cast<std::uint64_t>(i));
  return out;
}

int worker_count() { return omp_get_max_threads(); }

}  // namespace wtgfm
