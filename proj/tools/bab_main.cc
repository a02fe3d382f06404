// Command-line front end: run, oracle, generate, experiment.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "bab/errors.h"
#include "bab/harness.h"
#include "bab/oracle.h"
#include "json.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bab::InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw bab::InvalidInput(path + ": " + e.what());
  }
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw bab::InvalidInput("cannot write " + path);
  return out;
}

struct RunArgs {
  std::string instance;
  std::string mode;
  uint64_t seed = 0;
  int h = 0;
  double kappa = 0.0;
  double dmax = 0.05;
  std::string ss_alg = "greedy";
  bool oracle = false;
  std::string report_path;
  std::string assignment_path;
};

int Run(const RunArgs& args) {
  const bab::InstanceSpec spec = bab::LoadInstance(args.instance);
  bab::RunConfig config;
  if (!args.mode.empty()) config.mode = bab::ParseMode(args.mode);
  if (args.h > 0) config.h = args.h;
  config.seed = args.seed;
  config.kappa = args.kappa;
  config.delta_max = args.dmax;
  config.ss_alg = args.ss_alg;
  config.oracle = args.oracle;
  const bab::RunReport report =
      bab::RunOnline(bab::Materialize(spec, config.mode), config);
  if (args.report_path.empty()) {
    bab::WriteReportCsv(report, std::cout);
  } else {
    std::ofstream out = OpenOut(args.report_path);
    bab::WriteReportCsv(report, out);
    std::cout << "total " << Num(report.total) << " (buy "
              << Num(report.buy) << ", length " << Num(report.length)
              << ", penalty " << Num(report.penalty) << "), fallbacks "
              << report.fallbacks << ", epochs " << report.epochs << '\n';
    if (report.ratio()) std::cout << "ratio " << Num(*report.ratio()) << '\n';
  }
  if (!args.assignment_path.empty()) {
    std::ofstream out = OpenOut(args.assignment_path);
    report.assignment.WriteCsv(out);
  }
  if (report.infeasible > 0) {
    std::cerr << report.infeasible << " pair(s) unreachable\n";
  }
  return 0;
}

int Oracle(const std::string& path) {
  const bab::Instance inst = bab::Materialize(bab::LoadInstance(path));
  if (inst.mode == bab::Mode::kPrize) {
    std::cout << "opt " << Num(bab::PrizeCollectingOpt(inst.graph, inst.pairs,
                                                       false))
              << '\n'
              << "junction_opt "
              << Num(bab::PrizeCollectingOpt(inst.graph, inst.pairs, true))
              << '\n';
    return 0;
  }
  std::cout << "opt " << Num(bab::OfflineOpt(inst.graph, inst.pairs).value)
            << '\n'
            << "junction_opt " << Num(bab::JunctionOpt(inst.graph, inst.pairs))
            << '\n'
            << "lp_lb " << Num(bab::LpLowerBound(inst.graph, inst.pairs))
            << '\n';
  return 0;
}

int Generate(const std::string& kind, const std::string& params,
             uint64_t seed, const std::string& out_path) {
  nlohmann::json p;
  try {
    p = params.empty() ? nlohmann::json::object()
                       : nlohmann::json::parse(params);
  } catch (const nlohmann::json::exception& e) {
    throw bab::InvalidInput(std::string("--params: ") + e.what());
  }
  const bab::InstanceSpec spec = bab::Generate(kind, p, seed);
  if (out_path.empty()) {
    std::cout << bab::InstanceToJson(spec).dump(2) << '\n';
  } else {
    bab::SaveInstance(spec, out_path);
  }
  return 0;
}

int Experiment(const std::string& suite_path, const std::string& out_path,
               int threads) {
  const nlohmann::json suite = ReadJson(suite_path);
  const std::vector<bab::ExperimentRun> runs = bab::ParseSuite(
      suite, std::filesystem::path(suite_path).parent_path().string());
  std::ofstream out = OpenOut(out_path);
  const bab::ExperimentSummary summary =
      bab::RunExperiment(runs, out, threads);
  std::cout << "runs " << summary.runs << ", failures "
            << summary.failures.size() << '\n';
  for (const std::string& f : summary.failures) std::cout << "  " << f << '\n';
  if (summary.max_ratio) {
    std::cout << "max ratio " << Num(*summary.max_ratio) << '\n'
              << "geomean ratio " << Num(*summary.geomean_ratio) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online buy-at-bulk network design harness"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the online algorithm");
  run_cmd->set_help_flag("--help", "Print this help message and exit");
  run_cmd->add_option("--instance", run.instance, "Instance JSON")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--mode", run.mode, "edge | node | directed | prize");
  run_cmd->add_option("--seed", run.seed, "Random seed");
  run_cmd->add_option("--h", run.h, "Layering height");
  run_cmd->add_option("--kappa", run.kappa, "Growth parameter");
  run_cmd->add_option("--dmax", run.dmax, "Largest solver step");
  run_cmd->add_option("--ss-alg", run.ss_alg, "Single-sink algorithm");
  run_cmd->add_flag("--oracle", run.oracle, "Compare with exact optima");
  run_cmd->add_option("-o,--output", run.report_path, "Report CSV");
  run_cmd->add_option("--assignment", run.assignment_path,
                      "Assignment CSV");

  std::string oracle_instance;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Print opt, junction_opt and lp_lb");
  oracle_cmd->add_option("--instance", oracle_instance, "Instance JSON")
      ->required()
      ->check(CLI::ExistingFile);

  std::string kind;
  std::string params;
  uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Generate an instance");
  gen_cmd
      ->add_option("--kind", kind,
                   "random-digraph | grid | star-of-paths | adversarial")
      ->required();
  gen_cmd->add_option("--params", params, "JSON object of parameters");
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  gen_cmd->add_option("-o,--output", gen_out, "Output file");

  std::string suite;
  std::string suite_out;
  int threads = 1;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Run a suite");
  exp_cmd->add_option("--suite", suite, "Suite JSON")
      ->required()
      ->check(CLI::ExistingFile);
  exp_cmd->add_option("-o,--output", suite_out, "Output CSV")->required();
  exp_cmd->add_option("--threads", threads, "Worker threads");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*run_cmd) return Run(run);
    if (*oracle_cmd) return Oracle(oracle_instance);
    if (*gen_cmd) return Generate(kind, params, gen_seed, gen_out);
    if (*exp_cmd) return Experiment(suite, suite_out, threads);
  } catch (const bab::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const bab::BudgetExceeded& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
