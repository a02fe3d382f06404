#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

#include <spdlog/spdlog.h>

#include "bab/errors.h"
#include "bab/harness.h"

namespace bab {
namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string OptNum(const std::optional<double>& v) {
  return v ? Num(*v) : std::string();
}

struct RunResult {
  std::string name;
  std::optional<RunReport> report;
  std::string error;
  double wall_ms = 0.0;
};

RunResult Execute(const ExperimentRun& run) {
  RunResult result;
  if (run.generate) {
    const nlohmann::json& gen = *run.generate;
    result.name = "gen:" + gen.value("kind", std::string("?")) + ":" +
                  std::to_string(gen.value("seed", uint64_t{0}));
  } else {
    result.name = run.instance;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    InstanceSpec spec;
    if (run.generate) {
      const nlohmann::json& gen = *run.generate;
      spec = Generate(gen.at("kind").get<std::string>(),
                      gen.value("params", nlohmann::json::object()),
                      gen.value("seed", uint64_t{0}));
    } else {
      spec = LoadInstance(run.instance);
    }
    result.report = RunOnline(Materialize(spec, run.config.mode), run.config);
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

}  // namespace

std::vector<ExperimentRun> ParseSuite(const nlohmann::json& suite,
                                      const std::string& base_dir) {
  if (!suite.is_object() || !suite.contains("runs") ||
      !suite["runs"].is_array()) {
    throw InvalidInput("suite must be an object with a 'runs' array");
  }
  std::vector<ExperimentRun> runs;
  try {
    for (const nlohmann::json& j : suite["runs"]) {
      ExperimentRun run;
      if (j.contains("generate")) {
        run.generate = j["generate"];
      } else {
        std::filesystem::path path = j.at("instance").get<std::string>();
        if (path.is_relative() && !base_dir.empty()) {
          path = std::filesystem::path(base_dir) / path;
        }
        run.instance = path.string();
      }
      RunConfig& c = run.config;
      if (j.contains("mode")) c.mode = ParseMode(j["mode"].get<std::string>());
      if (j.contains("h")) c.h = j["h"].get<int>();
      c.seed = j.value("seed", uint64_t{0});
      c.kappa = j.value("kappa", 0.0);
      c.delta_max = j.value("dmax", 0.05);
      c.ss_alg = j.value("ss_alg", std::string("greedy"));
      c.oracle = j.value("oracle", false);
      runs.push_back(std::move(run));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed suite: ") + e.what());
  }
  return runs;
}

ExperimentSummary RunExperiment(const std::vector<ExperimentRun>& runs,
                                std::ostream& csv, int threads) {
  std::vector<RunResult> results(runs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < runs.size(); i = next++) {
      results[i] = Execute(runs[i]);
    }
  };
  std::vector<std::thread> pool;
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(runs.size())));
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  ExperimentSummary summary;
  summary.runs = static_cast<int>(runs.size());
  csv << kExperimentHeader << '\n';
  double log_sum = 0.0;
  int ratios = 0;
  for (size_t i = 0; i < runs.size(); ++i) {
    const RunResult& r = results[i];
    const std::string mode =
        runs[i].config.mode ? ModeName(*runs[i].config.mode) : "";
    if (!r.report) {
      summary.failures.push_back(r.name + ": " + r.error);
      spdlog::warn("run {} failed: {}", r.name, r.error);
      csv << r.name << ",,," << mode << ",,,,,,," << Num(r.wall_ms) << '\n';
      continue;
    }
    const RunReport& rep = *r.report;
    const std::optional<double> ratio = rep.ratio();
    csv << r.name << ',' << rep.n << ',' << rep.k << ',' << rep.mode << ','
        << Num(rep.total) << ',' << OptNum(rep.opt) << ','
        << OptNum(rep.junction_opt) << ',' << OptNum(ratio) << ','
        << Num(rep.fallback_rate()) << ',' << rep.epochs << ','
        << Num(r.wall_ms) << '\n';
    if (ratio) {
      summary.max_ratio = std::max(summary.max_ratio.value_or(0.0), *ratio);
      log_sum += std::log(*ratio);
      ++ratios;
    }
  }
  if (ratios > 0) summary.geomean_ratio = std::exp(log_sum / ratios);
  return summary;
}

}  // namespace bab
