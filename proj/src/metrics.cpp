#include "wtgfm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wtgfm/errors.hpp"

namespace wtgfm {

void SimTrace::reserve(std::size_t n) {
  for (auto* s : {&t, &f_g, &f_gsc, &v_dc, &omega_r, &beta, &p_wt, &p_gsc, &p_g, &omega_msc, &p_load}) s->reserve(n);
}

bool SimTrace::valid() const {
  for (const auto* s : {&t, &f_g, &f_gsc, &v_dc, &omega_r, &beta, &p_wt, &p_gsc, &p_g}) {
    if (s->size() != t.size()) return false;
    for (double v : *s) {
      if (!std::isfinite(v)) return false;
    }
  }
  if (t.size() < 2) return true;
  const double dt = t[1] - t[0];
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - dt) > 1e-9 * std::max(1.0, t[k])) return false;
  }
  return true;
}

double window_mean(const SimTrace& trace, const std::vector<double>& series, double t0, double t1) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace.t[k] >= t0 - 1e-12 && trace.t[k] < t1 - 1e-12) {
      sum += series[k];
      ++n;
    }
  }
  if (n == 0) throw DomainError("empty averaging window");
  return sum / static_cast<double>(n);
}

FrequencyMetrics compute_metrics(const SimTrace& trace, double event_time, double f_base, double rocof_window,
                                 double ss_window) {
  if (trace.size() < 3) throw DomainError("trace too short");
  const double t_end = trace.t.back();
  if (event_time < trace.t.front() || event_time > t_end) throw DomainError("event outside trace");
  if (t_end - event_time < ss_window) throw DomainError("trace too short after event for steady-state window");

  FrequencyMetrics m;
  const double dt = trace.t[1] - trace.t[0];
  const double pre_start = std::max(trace.t.front(), event_time - 1.0);
  const bool has_pre = event_time - pre_start >= dt;
  m.f_pre = has_pre ? window_mean(trace, trace.f_g, pre_start, event_time) : trace.f_g.front();
  const double p_pre = has_pre ? window_mean(trace, trace.p_wt, pre_start, event_time) : trace.p_wt.front();
  const double v_pre = has_pre ? window_mean(trace, trace.v_dc, pre_start, event_time) : trace.v_dc.front();

  m.nadir = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace.t[k] >= event_time - 1e-12 && trace.f_g[k] < m.nadir) {
      m.nadir = trace.f_g[k];
      m.t_nadir = trace.t[k];
    }
  }

  const auto lag = static_cast<std::size_t>(std::llround(rocof_window / dt));
  if (lag == 0 || lag >= trace.size()) throw DomainError("RoCoF window does not fit the trace");
  for (std::size_t k = lag; k < trace.size(); ++k) {
    if (trace.t[k] <= event_time) continue;
    const double r = std::abs(trace.f_g[k] - trace.f_g[k - lag]) / (trace.t[k] - trace.t[k - lag]);
    m.rocof_max = std::max(m.rocof_max, r);
  }

  const double ss0 = t_end - ss_window + 0.5 * dt;
  const double ss1 = t_end + dt;
  m.f_ss = window_mean(trace, trace.f_g, ss0, ss1);
  m.dv_dc_ss = window_mean(trace, trace.v_dc, ss0, ss1) - v_pre;
  m.dp_wt_ss = window_mean(trace, trace.p_wt, ss0, ss1) - p_pre;
  m.domega_g_ss = (m.f_ss - m.f_pre) / f_base;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.stiffness = m.domega_g_ss != 0.0 ? -m.dp_wt_ss / m.domega_g_ss : nan;
  m.droop = m.dp_wt_ss != 0.0 ? -m.domega_g_ss / m.dp_wt_ss : nan;
  return m;
}

}  // namespace wtgfm
