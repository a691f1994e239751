#include "wtgfm/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wtgfm/errors.hpp"

namespace wtgfm {

using nlohmann::json;

namespace {

constexpr const char* kTraceHeader = "t,f_g,f_gsc,v_dc,omega_r,beta,p_wt,p_gsc,p_g";

void put(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DomainError("bad number in CSV: '" + s + "'");
  return v;
}

json nan_safe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// CSV column order
template <class Trace>
auto columns(Trace& t) {
  return std::array{&t.t, &t.f_g, &t.f_gsc, &t.v_dc, &t.omega_r, &t.beta, &t.p_wt, &t.p_gsc, &t.p_g};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << kTraceHeader << '\n';
  const auto cols = columns(trace);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      put(out, (*cols[c])[k]);
    }
    out << '\n';
  }
}

SimTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw DomainError("trace CSV header mismatch");
  SimTrace tr;
  const auto cols = columns(tr);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    for (auto* col : cols) {
      if (!std::getline(ss, cell, ',')) throw DomainError("trace CSV row has too few columns");
      col->push_back(parse_double(cell));
    }
  }
  return tr;
}

json metrics_json(const FrequencyMetrics& m) {
  return {{"f_pre_hz", nan_safe(m.f_pre)},       {"nadir_hz", nan_safe(m.nadir)},
          {"t_nadir_s", nan_safe(m.t_nadir)},    {"rocof_max_hz_per_s", nan_safe(m.rocof_max)},
          {"f_ss_hz", nan_safe(m.f_ss)},         {"dv_dc_ss_pu", nan_safe(m.dv_dc_ss)},
          {"dp_wt_ss_pu", nan_safe(m.dp_wt_ss)}, {"domega_g_ss_pu", nan_safe(m.domega_g_ss)},
          {"stiffness_pu", nan_safe(m.stiffness)}, {"droop_pu", nan_safe(m.droop)}};
}

json design_json(const GainDesign& d) {
  const auto& g = d.gains;
  return {{"v_w", d.point.v_w},
          {"eta", d.point.eta},
          {"lambda_del", d.point.lambda_del},
          {"omega_del_pu", d.point.omega_del_pu},
          {"beta_del_deg", d.point.beta_del_deg},
          {"lambda_mpp", d.mpp.lambda},
          {"cp_max", d.mpp.cp},
          {"omega_mpp_pu", d.omega_mpp},
          {"k_omega", d.sens.k_omega},
          {"k_omega_raw", d.sens.k_omega_raw},
          {"k_beta", d.sens.k_beta},
          {"k_theta_gsc", g.gsc.k_theta},
          {"k_d_gsc", g.gsc.k_d},
          {"k_theta_msc", g.msc.k_theta},
          {"k_d_msc", g.msc.k_d},
          {"k_p", g.pitch.k_p},
          {"m_p", nan_safe(d.m_p)},
          {"has_droop", d.has_droop},
          {"floor_applied", d.floor_applied},
          {"target_met", d.target_met},
          {"ratio_condition", g.ratio_condition()}};
}

json checks_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"value", nan_safe(c.value)}, {"limit", c.limit}, {"pass", c.pass}});
  }
  return arr;
}

json run_json(const RunResult& run, const FrequencyMetrics* metrics) {
  json j = {{"mode", to_string(run.scenario.mode)},
            {"v_w", run.scenario.v_w},
            {"eta", run.scenario.eta},
            {"design", design_json(run.design)},
            {"equilibrium_residual", run.equilibrium.residual},
            {"max_dc_energy_residual", run.max_dc_energy_residual},
            {"samples", run.trace.size()}};
  if (metrics) j["metrics"] = metrics_json(*metrics);
  return j;
}

json compare_json(const CompareReport& report) {
  json runs = json::array();
  for (const auto& r : report.runs) runs.push_back(run_json(r.run, &r.metrics));
  return {{"runs", runs}, {"checks", checks_json(report.checks)}, {"all_pass", report.all_pass()}};
}

json model_json(const SmallSignalModel& model, const StabilityVerdict& verdict, const LaSalleReport* lasalle) {
  json spectrum = json::array();
  for (Eigen::Index i = 0; i < verdict.spectrum.size(); ++i) {
    spectrum.push_back({{"re", verdict.spectrum[i].real()}, {"im", verdict.spectrum[i].imag()}});
  }
  json j = {{"labels", model.labels},
            {"T", matrix_json(model.t)},
            {"A", matrix_json(model.a)},
            {"E", matrix_json(model.e)},
            {"system_matrix", matrix_json(model.system_matrix())},
            {"spectrum", spectrum},
            {"max_real", verdict.max_real},
            {"stable", verdict.stable},
            {"theorem1_conditions", theorem1_conditions(model.params)},
            {"tdc_zero_assumed", model.params.tdc_zero}};
  if (lasalle) {
    j["lasalle"] = {{"M", matrix_json(lasalle->m)},
                    {"V", matrix_json(lasalle->v)},
                    {"S", matrix_json(lasalle->s)},
                    {"min_eig_M", lasalle->min_eig_m},
                    {"min_eig_V", lasalle->min_eig_v},
                    {"max_eig_S", lasalle->max_eig_s},
                    {"max_deviation_S_plus_V", lasalle->max_deviation},
                    {"passed", lasalle->passed}};
  }
  return j;
}

void write_trace_svg(std::ostream& out, const std::vector<std::pair<std::string, const SimTrace*>>& traces,
                     const std::string& title) {
  struct Panel {
    const char* label;
    std::vector<const std::vector<double>*> (*pick)(const SimTrace&);
  };
  const Panel panels[] = {
      {"v_dc [pu]", [](const SimTrace& t) { return std::vector<const std::vector<double>*>{&t.v_dc}; }},
      {"P_wt, P_gsc [pu]", [](const SimTrace& t) { return std::vector<const std::vector<double>*>{&t.p_wt, &t.p_gsc}; }},
      {"f_g, f_gsc [Hz]", [](const SimTrace& t) { return std::vector<const std::vector<double>*>{&t.f_g, &t.f_gsc}; }},
      {"omega_r [pu]", [](const SimTrace& t) { return std::vector<const std::vector<double>*>{&t.omega_r}; }},
      {"beta [deg]", [](const SimTrace& t) { return std::vector<const std::vector<double>*>{&t.beta}; }},
  };
  const double w = 900, ph = 160, gap = 30, left = 80, right = 20, top = 40;
  const double height = top + 5 * (ph + gap) + 20;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  out << std::setprecision(6);
  for (std::size_t li = 0; li < traces.size(); ++li) {
    out << "<text x=\"" << w - 200 << "\" y=\"" << 15 + 12 * li << "\" fill=\"" << kColours[li % 5] << "\">"
        << traces[li].first << "</text>\n";
  }
  for (std::size_t p = 0; p < 5; ++p) {
    const double y0 = top + p * (ph + gap);
    double t_min = std::numeric_limits<double>::infinity(), t_max = -t_min;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [name, tr] : traces) {
      if (tr->size() == 0) continue;
      t_min = std::min(t_min, tr->t.front());
      t_max = std::max(t_max, tr->t.back());
      for (const auto* s : panels[p].pick(*tr)) {
        for (double v : *s) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
    }
    if (!(t_max > t_min)) continue;
    if (hi - lo < 1e-9) {
      lo -= 0.5e-3;
      hi += 0.5e-3;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double pw = w - left - right;
    out << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    out << "<text x=\"5\" y=\"" << y0 + 12 << "\">" << panels[p].label << "</text>\n";
    out << "<text x=\"5\" y=\"" << y0 + ph << "\">" << lo << "</text>\n";
    out << "<text x=\"5\" y=\"" << y0 + 26 << "\">" << hi << "</text>\n";
    for (std::size_t li = 0; li < traces.size(); ++li) {
      const SimTrace& tr = *traces[li].second;
      const auto series = panels[p].pick(tr);
      for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = *series[si];
        const std::size_t stride = std::max<std::size_t>(1, s.size() / 1500);
        out << "<polyline fill=\"none\" stroke=\"" << kColours[li % 5] << "\""
            << (si ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
        for (std::size_t k = 0; k < s.size(); k += stride) {
          const double x = left + pw * (tr.t[k] - t_min) / (t_max - t_min);
          const double y = y0 + ph * (1.0 - (s[k] - lo) / (hi - lo));
          out << x << ',' << y << ' ';
        }
        out << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
}

void write_droop_svg(std::ostream& out, const DroopMap& map) {
  const double cw = 40, ch = 28, left = 70, top = 40;
  const double w = left + cw * map.v_grid.size() + 120;
  const double h = top + ch * map.eta_grid.size() + 50;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : map.cells) {
    if (std::isfinite(c.m_p)) {
      lo = std::min(lo, c.m_p);
      hi = std::max(hi, c.m_p);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">smallest droop m_p [%]</text>\n";
  out << std::setprecision(4);
  for (std::size_t i = 0; i < map.v_grid.size(); ++i) {
    for (std::size_t j = 0; j < map.eta_grid.size(); ++j) {
      const auto& c = map.at(i, j);
      const double x = left + cw * i;
      const double y = top + ch * (map.eta_grid.size() - 1 - j);
      std::string fill = "#bbbbbb";
      if (std::isfinite(c.m_p)) {
        const double u = std::clamp((std::log(c.m_p) - std::log(lo)) / (std::log(hi) - std::log(lo) + 1e-300), 0.0, 1.0);
        const int r = static_cast<int>(255 * u);
        const int b = static_cast<int>(255 * (1.0 - u));
        std::ostringstream col;
        col << "rgb(" << r << ",80," << b << ")";
        fill = col.str();
      }
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
          << fill << "\" stroke=\"white\"/>\n";
      if (std::isfinite(c.m_p)) {
        out << "<text x=\"" << x + 3 << "\" y=\"" << y + 17 << "\" fill=\"white\">" << 100.0 * c.m_p << "</text>\n";
      }
    }
    out << "<text x=\"" << left + cw * i + 8 << "\" y=\"" << top + ch * map.eta_grid.size() + 14 << "\">"
        << map.v_grid[i] << "</text>\n";
  }
  for (std::size_t j = 0; j < map.eta_grid.size(); ++j) {
    out << "<text x=\"20\" y=\"" << top + ch * (map.eta_grid.size() - 1 - j) + 17 << "\">" << map.eta_grid[j]
        << "</text>\n";
  }
  out << "<text x=\"" << left << "\" y=\"" << h - 8 << "\">v_w [m/s] (columns), eta (rows)</text>\n</svg>\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace wtgfm
