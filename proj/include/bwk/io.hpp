#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bwk/harness.hpp"
#include "bwk/instance.hpp"

namespace bwk {

using json = nlohmann::json;

inline json instance_to_json(const ProblemInstance& inst) {
  return json{{"label", inst.label}, {"m", inst.m},   {"d", inst.d},
              {"b", inst.b},         {"mu", inst.mu}, {"C", inst.C},
              {"dist", to_string(inst.dist)}};
}

inline ProblemInstance instance_from_json(const json& j) {
  ProblemInstance inst;
  inst.label = j.value("label", "");
  inst.m = j.at("m").get<int>();
  inst.d = j.at("d").get<int>();
  inst.b = j.at("b").get<double>();
  inst.mu = j.at("mu").get<std::vector<double>>();
  inst.C = j.at("C").get<std::vector<std::vector<double>>>();
  inst.dist = dist_from_string(j.at("dist").get<std::string>());
  inst.validate();
  return inst;
}

inline void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << instance_to_json(inst).dump(2) << "\n";
}

inline ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  json j;
  in >> j;
  return instance_from_json(j);
}

inline json diagnostics_to_json(const InstanceDiagnostics& diag) {
  json j{{"opt_lp_per_t", diag.opt_lp_per_t},
         {"x_star_per_t", diag.x_star_per_t},
         {"y_star", diag.y_star},
         {"I_star", diag.I_star},
         {"I_prime", diag.I_prime},
         {"J_star", diag.J_star},
         {"J_prime", diag.J_prime},
         {"delta_i", diag.delta_i},
         {"sigma", diag.sigma},
         {"chi", diag.chi},
         {"nondegenerate", diag.nondegenerate},
         {"opt_i_per_t", diag.opt_i_per_t},
         {"opt_j_per_t", diag.opt_j_per_t},
         {"warnings", diag.warnings}};
  j["delta"] = std::isfinite(diag.delta) ? json(diag.delta) : json();
  j["theta"] = std::isfinite(diag.theta) ? json(diag.theta) : json();
  return j;
}

inline json trace_summary_to_json(const RunTrace& tr) {
  json j{{"type", "episode"},
         {"policy", tr.policy},
         {"T", tr.T},
         {"master_seed", tr.master_seed},
         {"rep", tr.rep},
         {"tau", tr.tau},
         {"total_reward", tr.total_reward},
         {"final_counts", tr.final_counts},
         {"remaining_final", tr.remaining_final},
         {"I_hat", std::vector<int>(tr.I_hat.begin(), tr.I_hat.end())},
         {"J_hat", std::vector<int>(tr.J_hat.begin(), tr.J_hat.end())},
         {"exhausted_in_phase1", tr.exhausted_in_phase1}};
  if (tr.phase1_end) j["phase1_end"] = *tr.phase1_end;
  return j;
}

inline RunTrace trace_summary_from_json(const json& j) {
  RunTrace tr;
  tr.policy = j.at("policy").get<std::string>();
  tr.T = j.at("T").get<long long>();
  tr.master_seed = j.at("master_seed").get<uint64_t>();
  tr.rep = j.at("rep").get<uint64_t>();
  tr.tau = j.at("tau").get<long long>();
  tr.total_reward = j.at("total_reward").get<double>();
  tr.final_counts = j.at("final_counts").get<std::vector<long long>>();
  tr.remaining_final = j.at("remaining_final").get<std::vector<double>>();
  for (int i : j.at("I_hat").get<std::vector<int>>()) tr.I_hat.insert(i);
  for (int i : j.at("J_hat").get<std::vector<int>>()) tr.J_hat.insert(i);
  tr.exhausted_in_phase1 = j.value("exhausted_in_phase1", false);
  if (j.contains("phase1_end")) tr.phase1_end = j.at("phase1_end").get<long long>();
  return tr;
}

/// Writes one episode as JSONL: header record, per-step records, summary.
inline void write_full_trace(const RunTrace& tr, const ProblemInstance& inst,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << json{{"type", "header"},
              {"instance", inst.label},
              {"policy", tr.policy},
              {"T", tr.T},
              {"master_seed", tr.master_seed},
              {"rep", tr.rep}}
             .dump()
      << "\n";
  for (const auto& s : tr.steps)
    out << json{{"type", "step"},
                {"t", s.t},
                {"arm", s.arm},
                {"reward", s.reward},
                {"consumption", s.consumption},
                {"remaining", s.remaining}}
               .dump()
        << "\n";
  json tail = trace_summary_to_json(tr);
  json bsamples = json::array();
  for (const auto& [t, ratio] : tr.b_ratio_samples)
    bsamples.push_back(json{{"t", t}, {"b_ratio", ratio}});
  tail["b_ratio_samples"] = bsamples;
  out << tail.dump() << "\n";
}

inline void write_episode_summaries(const std::vector<RunTrace>& traces,
                                    const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (!traces.empty())
    out << json{{"type", "header"},
                {"instance", inst.label},
                {"policy", traces.front().policy},
                {"T", traces.front().T},
                {"reps", traces.size()},
                {"master_seed", traces.front().master_seed}}
               .dump()
        << "\n";
  for (const auto& tr : traces) out << trace_summary_to_json(tr).dump() << "\n";
}

inline std::vector<RunTrace> read_episode_summaries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::vector<RunTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.value("type", "") == "episode") traces.push_back(trace_summary_from_json(j));
  }
  return traces;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// CSV over report cells; one leftover column per resource.
inline std::string report_csv(const std::vector<RegretReport>& cells, int d) {
  std::ostringstream out;
  out << "policy,T,reps,mean_regret,stderr,subopt_term,leftover_term,bound,"
         "identification_accuracy,phase1_mean_length";
  for (int j = 0; j < d; ++j) out << ",leftover_j" << j << "_mean";
  out << "\n";
  for (const auto& c : cells) {
    out << c.policy << "," << c.T << "," << c.reps << "," << format_double(c.mean_regret)
        << "," << format_double(c.regret_stderr) << "," << format_double(c.mean_subopt_term)
        << "," << format_double(c.mean_leftover_term) << "," << format_double(c.mean_bound)
        << "," << format_double(c.identification_accuracy) << ","
        << format_double(c.phase1_mean_length);
    for (int j = 0; j < d; ++j)
      out << "," << format_double(j < static_cast<int>(c.mean_leftover.size())
                                      ? c.mean_leftover[j]
                                      : std::numeric_limits<double>::quiet_NaN());
    out << "\n";
  }
  return out.str();
}

/// Plot-data CSV: regret vs log T / sqrt T points, rendering left to external tools.
inline std::string plot_csv(const std::vector<RegretReport>& cells) {
  std::ostringstream out;
  out << "policy,T,log_T,sqrt_T,mean_regret,stderr\n";
  for (const auto& c : cells) {
    const double Td = static_cast<double>(c.T);
    out << c.policy << "," << c.T << "," << format_double(std::log(Td)) << ","
        << format_double(std::sqrt(Td)) << "," << format_double(c.mean_regret) << ","
        << format_double(c.regret_stderr) << "\n";
  }
  return out.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace bwk
