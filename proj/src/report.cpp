#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gstrack/harness.hpp"

namespace gstrack {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const RunReport& report, std::ostream& out) {
  out << "t,policy,nmse,trace_p_post,budget,vertices,solver_iters,solver_gradnorm\n";
  for (const auto& trace : report.traces) {
    const std::string label(policy_label(trace.policy));
    for (const auto& s : trace.steps) {
      out << s.t << ',' << label << ',' << format_double(s.nmse) << ',' << format_double(s.trace_p_post) << ','
          << s.budget << ',';
      for (std::size_t k = 0; k < s.vertices.size(); ++k) out << (k ? ";" : "") << s.vertices[k];
      out << ',' << s.solver_iters << ',' << format_double(s.solver_gradnorm) << '\n';
    }
  }
}

json summary_json(const RunReport& report) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = to_json(report.config);
  doc["base_edge_count"] = report.base_edge_count;
  if (!report.trajectory.empty()) doc["trajectory"] = report.trajectory;
  if (!report.realization_edge_counts.empty()) doc["realization_edge_counts"] = report.realization_edge_counts;
  doc["notes"] = {
      "accumulated_nmse is the sum of per-step NMSE; accumulated_trace is the sum of tr(P+)",
      "M1-style and M2-style baselines approximate the cited methods by their one-line characterization",
      "all policies share the truth and observation-noise streams (common random numbers)"};
  json policies = json::array();
  for (const auto& trace : report.traces) {
    json p;
    p["policy"] = policy_name(trace.policy);
    p["label"] = policy_label(trace.policy);
    p["accumulated_nmse"] = accumulated_error(trace);
    p["accumulated_trace"] = accumulated_trace(trace);
    p["steps"] = trace.steps.size();
    if (!trace.solves.empty()) {
      int total_iters = 0;
      int unconverged = 0;
      double worst_gradnorm = 0.0;
      for (const auto& d : trace.solves) {
        total_iters += d.iterations;
        unconverged += d.converged ? 0 : 1;
        worst_gradnorm = std::max(worst_gradnorm, d.gradient_norm);
      }
      p["solver"] = {{"solves", trace.solves.size()},
                     {"mean_iterations", static_cast<double>(total_iters) / static_cast<double>(trace.solves.size())},
                     {"unconverged", unconverged},
                     {"worst_gradient_norm", worst_gradnorm}};
    }
    policies.push_back(std::move(p));
  }
  doc["policies"] = std::move(policies);
  return doc;
}

WrittenReport write_report(const RunReport& report) {
  namespace fs = std::filesystem;
  const fs::path dir(report.config.output_dir);
  fs::create_directories(dir);
  WrittenReport paths{(dir / (report.config.output_prefix + "_trace.csv")).string(),
                      (dir / (report.config.output_prefix + "_summary.json")).string()};
  std::ofstream trace(paths.trace_path, std::ios::binary);
  if (!trace) throw std::runtime_error("cannot write '" + paths.trace_path + "'");
  write_trace_csv(report, trace);
  std::ofstream summary(paths.summary_path, std::ios::binary);
  if (!summary) throw std::runtime_error("cannot write '" + paths.summary_path + "'");
  summary << summary_json(report).dump(2) << '\n';
  return paths;
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,policy,nmse", 0) != 0) {
    throw std::runtime_error("trace CSV: missing or unexpected header");
  }
  std::vector<TraceRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 3) throw std::runtime_error("trace CSV: malformed line " + std::to_string(line_no));
    TraceRow row;
    try {
      row.t = std::stoi(fields[0]);
      row.policy = fields[1];
      row.nmse = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw std::runtime_error("trace CSV: malformed line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_plot_data(const std::vector<TraceRow>& rows, std::ostream& out) {
  std::vector<std::string> policies;
  std::map<int, std::map<std::string, double>> table;
  for (const auto& r : rows) {
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) policies.push_back(r.policy);
    table[r.t][r.policy] = r.nmse;
  }
  out << 't';
  for (const auto& p : policies) out << ',' << p;
  out << '\n';
  for (const auto& [t, values] : table) {
    out << t;
    for (const auto& p : policies) {
      out << ',';
      if (auto it = values.find(p); it != values.end()) out << format_double(it->second);
    }
    out << '\n';
  }
}

}  // namespace gstrack
