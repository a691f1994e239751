#pragma once

#include <string>
#include <vector>

namespace wtgfm {

/// Uniformly sampled simulation output. The CSV carries the first nine
/// series; omega_msc and p_load are kept for in-process checks.
struct SimTrace {
  std::vector<double> t;        // s
  std::vector<double> f_g;      // Hz
  std::vector<double> f_gsc;    // Hz
  std::vector<double> v_dc;     // pu
  std::vector<double> omega_r;  // pu
  std::vector<double> beta;     // deg
  std::vector<double> p_wt;     // pu
  std::vector<double> p_gsc;    // pu
  std::vector<double> p_g;      // pu
  std::vector<double> omega_msc;
  std::vector<double> p_load;

  std::size_t size() const { return t.size(); }
  void reserve(std::size_t n);
  /// No NaN/Inf and constant sampling (1e-9 relative).
  bool valid() const;
};

struct FrequencyMetrics {
  double f_pre = 0.0;             // Hz, mean over the second before the event
  double nadir = 0.0;             // Hz
  double t_nadir = 0.0;           // s
  double rocof_max = 0.0;         // Hz/s over a 100 ms window
  double f_ss = 0.0;              // Hz, mean of the final 2 s
  double dv_dc_ss = 0.0;          // pu
  double dp_wt_ss = 0.0;          // pu
  double domega_g_ss = 0.0;       // pu
  double stiffness = 0.0;         // -dP_wt / domega_g
  double droop = 0.0;             // 1 / stiffness, comparable to m_p; NaN without response
};

/// Mean of series over [t0, t1).
double window_mean(const SimTrace& trace, const std::vector<double>& series, double t0, double t1);

FrequencyMetrics compute_metrics(const SimTrace& trace, double event_time, double f_base = 50.0,
                                 double rocof_window = 0.1, double ss_window = 2.0);

}  // namespace wtgfm
