#include "vdcsim/telemetry.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace vdcsim {

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) {
    throw std::runtime_error("CsvWriter: cannot open " + path);
  }
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  for (size_t i = 0; i < columns.size(); ++i) {
    out_ << (i ? "," : "") << columns[i];
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) {
    throw std::runtime_error("CsvWriter: row width does not match header");
  }
  char buf[32];
  for (size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    if (i) {
      out_ << ',';
    }
    out_ << buf;
  }
  out_ << "\n";
}

namespace {

std::vector<double> to_std(const Vec6& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5)};
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
  nlohmann::json j;
  j["steps"] = s.steps;
  j["dt"] = s.dt;
  j["duration"] = s.duration;
  j["diverged"] = s.diverged;
  j["diverged_reason"] = s.diverged_reason;
  j["energy"]["net"] = s.energy_net;
  j["energy"]["absorbed"] = s.energy_absorbed;
  j["energy"]["injected"] = s.energy_injected;
  j["energy"]["min_running_net"] = s.min_running_energy;
  j["max_abs_upsilon"] = s.max_abs_upsilon;
  j["max_abs_upsilon_after_transient"] = s.max_abs_upsilon_after_transient;
  j["max_abs_upsilon_sustained_contact"] = s.max_abs_upsilon_sustained_contact;
  j["min_pseudo_inertia_eigenvalue"] = s.min_pseudo_inertia_eig;
  j["spd_projections"] = s.spd_projections;
  j["stability_integral"] = s.stability_integral;
  j["max_abs_stability_free_motion"] = s.max_abs_stability_free;
  j["max_stability_form_gap"] = s.max_stability_form_gap;
  j["bounce_count"] = s.bounce_count;
  j["contact_steps"] = s.contact_steps;
  j["first_contact_time"] = s.first_contact_time;
  j["last_contact_time"] = s.last_contact_time;
  j["free_motion_rms_error"] = s.free_motion_rms_error;
  j["final_pose"] = to_std(s.final_pose);
  j["final_e_x"] = to_std(s.final_e_x);
  return j.dump(2);
}

void write_summary_json(const RunSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_summary_json: cannot open " + path);
  }
  out << summary_to_json(summary) << "\n";
}

}  // namespace vdcsim
