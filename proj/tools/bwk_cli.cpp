// bwk: reproducible BwK experiments from the command line.
//
// Subcommands: generate, diagnose, run, sweep, report. All outputs are
// deterministic in the provided seeds; `report` rebuilds the CSVs of a
// previous `sweep` from its persisted summaries, byte for byte.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bwk/harness.hpp"
#include "bwk/instance.hpp"
#include "bwk/io.hpp"

namespace fs = std::filesystem;
using namespace bwk;

namespace {

void print_diagnostics(const InstanceDiagnostics& d) {
  auto vec = [](const std::vector<double>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + ")";
  };
  auto idx = [](const std::vector<int>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "}";
  };
  std::cout << "OPT_LP / T : " << format_double(d.opt_lp_per_t) << "\n"
            << "x* / T     : " << vec(d.x_star_per_t) << "\n"
            << "y*         : " << vec(d.y_star) << "\n"
            << "I* / I'    : " << idx(d.I_star) << " / " << idx(d.I_prime) << "\n"
            << "J* / J'    : " << idx(d.J_star) << " / " << idx(d.J_prime) << "\n"
            << "Delta      : " << vec(d.delta_i) << "\n"
            << "delta      : " << format_double(d.delta) << "\n"
            << "sigma      : " << format_double(d.sigma) << "\n"
            << "chi        : " << format_double(d.chi) << "\n"
            << "theta      : " << format_double(d.theta) << "\n"
            << "nondegen.  : " << (d.nondegenerate ? "yes" : "no") << "\n";
  for (const auto& w : d.warnings) std::cout << "warning    : " << w << "\n";
}

struct SweepConfig {
  std::string instance_path;
  std::vector<std::string> policies;
  std::vector<long long> T_grid;
  int reps = 0;
  uint64_t master_seed = 0;
  int monotone = -1;  // -1: per-policy default
  std::string out_dir;
};

json sweep_config_to_json(const SweepConfig& sc) {
  return json{{"instance", sc.instance_path}, {"policies", sc.policies},
              {"T_grid", sc.T_grid},          {"reps", sc.reps},
              {"master_seed", sc.master_seed}, {"monotone", sc.monotone},
              {"out_dir", sc.out_dir}};
}

SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig sc;
  sc.instance_path = j.at("instance").get<std::string>();
  sc.policies = j.at("policies").get<std::vector<std::string>>();
  sc.T_grid = j.at("T_grid").get<std::vector<long long>>();
  sc.reps = j.at("reps").get<int>();
  sc.master_seed = j.at("master_seed").get<uint64_t>();
  sc.monotone = j.at("monotone").get<int>();
  sc.out_dir = j.at("out_dir").get<std::string>();
  return sc;
}

std::string summaries_name(const std::string& policy, long long T) {
  return "summaries_" + policy + "_T" + std::to_string(T) + ".jsonl";
}

std::optional<bool> monotone_opt(int flag) {
  if (flag < 0) return std::nullopt;
  return flag != 0;
}

// Builds report.csv / plot.csv content from the persisted summaries of a
// sweep, so `report` can reproduce the original files exactly.
void build_report(const SweepConfig& sc, const ProblemInstance& inst, std::string& report,
                  std::string& plot) {
  std::vector<RegretReport> cells;
  for (const auto& policy : sc.policies) {
    for (long long T : sc.T_grid) {
      const auto traces =
          read_episode_summaries((fs::path(sc.out_dir) / summaries_name(policy, T)).string());
      cells.push_back(regret_report(traces, diagnostics(inst, T), T));
    }
  }
  report = report_csv(cells, inst.d);
  plot = plot_csv(cells);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Bandits-with-knapsacks experiment toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "create an instance file");
  std::string gen_out, gen_fixture, gen_dist = "bernoulli";
  int gen_m = 0, gen_d = 0;
  double gen_b = 0.5;
  uint64_t gen_seed = 0;
  long long gen_T = 1000;
  gen->add_option("--out", gen_out, "output instance JSON")->required();
  gen->add_option("--fixture", gen_fixture, "built-in fixture: f1 | f2");
  gen->add_option("--m-raw", gen_m, "factual arm count for the random generator");
  gen->add_option("--d-raw", gen_d, "factual resource count for the random generator");
  gen->add_option("--b", gen_b, "budget rate in (0,1]");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--dist", gen_dist, "bernoulli | deterministic");
  gen->add_option("--T", gen_T, "horizon for the printed diagnostics");

  // diagnose
  auto* diag_cmd = app.add_subcommand("diagnose", "print instance diagnostics");
  std::string diag_instance, diag_json;
  long long diag_T = 1000;
  double diag_tol = 1e-6;
  diag_cmd->add_option("--instance", diag_instance, "instance JSON")->required();
  diag_cmd->add_option("--T", diag_T, "horizon");
  diag_cmd->add_option("--tol", diag_tol, "classification tolerance");
  diag_cmd->add_option("--json", diag_json, "also dump diagnostics JSON here");

  // run
  auto* run_cmd = app.add_subcommand("run", "run one episode, write the full trace");
  std::string run_instance, run_policy, run_out;
  long long run_T = 0;
  uint64_t run_seed = 0, run_rep = 0;
  int run_monotone = -1;
  run_cmd->add_option("--instance", run_instance, "instance JSON")->required();
  run_cmd->add_option("--policy", run_policy, "two_phase | one_phase | static_lp | uniform")
      ->required();
  run_cmd->add_option("--T", run_T, "horizon")->required();
  run_cmd->add_option("--seed", run_seed, "master seed")->required();
  run_cmd->add_option("--rep", run_rep, "replication index");
  run_cmd->add_option("--monotone", run_monotone, "-1 default, 0 off, 1 on");
  run_cmd->add_option("--out", run_out, "output trace JSONL")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "replication sweep over a horizon grid");
  SweepConfig sc;
  sweep_cmd->add_option("--instance", sc.instance_path, "instance JSON")->required();
  sweep_cmd->add_option("--policy", sc.policies, "one or more policies")->required();
  sweep_cmd->add_option("--T", sc.T_grid, "ascending horizon grid")->required();
  sweep_cmd->add_option("--reps", sc.reps, "replications per cell")->required();
  sweep_cmd->add_option("--seed", sc.master_seed, "master seed")->required();
  sweep_cmd->add_option("--monotone", sc.monotone, "-1 default, 0 off, 1 on");
  sweep_cmd->add_option("--out", sc.out_dir, "output directory")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "rebuild CSVs from sweep artifacts");
  std::string report_dir;
  report_cmd->add_option("--dir", report_dir, "sweep output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    ProblemInstance inst;
    const DistKind dist = dist_from_string(gen_dist);
    if (!gen_fixture.empty()) {
      if (gen_fixture == "f1") inst = fixture_f1(dist);
      else if (gen_fixture == "f2") inst = fixture_f2(dist);
      else throw std::invalid_argument("unknown fixture: " + gen_fixture);
    } else {
      if (gen_m < 1 || gen_d < 1)
        throw std::invalid_argument("generate needs --fixture or --m-raw/--d-raw >= 1");
      inst = generate_random_instance(gen_m, gen_d, gen_b, gen_seed);
      inst.dist = dist;
    }
    save_instance(inst, gen_out);
    std::cout << "wrote " << gen_out << " (m=" << inst.m << ", d=" << inst.d
              << ", label=" << inst.label << ")\n";
    print_diagnostics(diagnostics(inst, gen_T));
  } else if (diag_cmd->parsed()) {
    const ProblemInstance inst = load_instance(diag_instance);
    const InstanceDiagnostics d = diagnostics(inst, diag_T, diag_tol);
    print_diagnostics(d);
    if (!diag_json.empty()) write_text(diag_json, diagnostics_to_json(d).dump(2) + "\n");
  } else if (run_cmd->parsed()) {
    const ProblemInstance inst = load_instance(run_instance);
    EpisodeConfig cfg;
    cfg.kind = policy_from_string(run_policy);
    cfg.T = run_T;
    cfg.master_seed = run_seed;
    cfg.rep = run_rep;
    cfg.monotone = monotone_opt(run_monotone);
    cfg.record_steps = true;
    const RunTrace tr = run_episode(inst, cfg);
    write_full_trace(tr, inst, run_out);
    std::cout << "tau = " << tr.tau << ", total reward = " << format_double(tr.total_reward)
              << ", trace -> " << run_out << "\n";
  } else if (sweep_cmd->parsed()) {
    for (const auto& p : sc.policies) policy_from_string(p);  // validate early
    const ProblemInstance inst = load_instance(sc.instance_path);
    fs::create_directories(sc.out_dir);
    write_text((fs::path(sc.out_dir) / "config.json").string(),
               sweep_config_to_json(sc).dump(2) + "\n");
    for (const auto& policy : sc.policies) {
      const PolicyKind kind = policy_from_string(policy);
      for (long long T : sc.T_grid) {
        const uint64_t cell_seed =
            stream_seed(sc.master_seed, hash_string(policy), static_cast<uint64_t>(T));
        const auto traces =
            run_replications(inst, kind, T, sc.reps, cell_seed, monotone_opt(sc.monotone));
        write_episode_summaries(
            traces, inst, (fs::path(sc.out_dir) / summaries_name(policy, T)).string());
        std::cout << policy << " T=" << T << ": done (" << sc.reps << " reps)\n";
      }
    }
    std::string report, plot;
    build_report(sc, inst, report, plot);
    write_text((fs::path(sc.out_dir) / "report.csv").string(), report);
    write_text((fs::path(sc.out_dir) / "plot.csv").string(), plot);
    std::cout << "report -> " << (fs::path(sc.out_dir) / "report.csv").string() << "\n";
  } else if (report_cmd->parsed()) {
    std::ifstream in(fs::path(report_dir) / "config.json");
    if (!in) throw std::runtime_error("missing config.json in " + report_dir);
    json j;
    in >> j;
    SweepConfig cfg = sweep_config_from_json(j);
    cfg.out_dir = report_dir;  // artifacts live where we found the config
    const ProblemInstance inst = load_instance(cfg.instance_path);
    std::string report, plot;
    build_report(cfg, inst, report, plot);
    write_text((fs::path(report_dir) / "report.csv").string(), report);
    write_text((fs::path(report_dir) / "plot.csv").string(), plot);
    std::cout << "report rebuilt in " << report_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
