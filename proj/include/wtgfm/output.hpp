#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wtgfm/gaindesign.hpp"
#include "wtgfm/metrics.hpp"
#include "wtgfm/scenario.hpp"
#include "wtgfm/smallsignal.hpp"

namespace wtgfm {

/// `t,f_g,f_gsc,v_dc,omega_r,beta,p_wt,p_gsc,p_g`, shortest round-trip
/// formatting.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
SimTrace read_trace_csv(std::istream& in);

nlohmann::json metrics_json(const FrequencyMetrics& m);
nlohmann::json design_json(const GainDesign& d);
nlohmann::json checks_json(const std::vector<CheckResult>& checks);
nlohmann::json run_json(const RunResult& run, const FrequencyMetrics* metrics);
nlohmann::json compare_json(const CompareReport& report);

/// Matrices row-major with labels, plus spectrum and certificate summary.
nlohmann::json model_json(const SmallSignalModel& model, const StabilityVerdict& verdict,
                          const LaSalleReport* lasalle);

/// Stacked line panels (DC voltage, powers, frequency, rotor speed, pitch),
/// one colour per labelled trace.
void write_trace_svg(std::ostream& out, const std::vector<std::pair<std::string, const SimTrace*>>& traces,
                     const std::string& title);

/// m_p heat map over (v_w, eta); cells without droop are grey.
void write_droop_svg(std::ostream& out, const DroopMap& map);

/// Writes `text` to `path`, creating parent directories; throws Error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace wtgfm
