// Batch runner: loads a scenario file, runs the selected scenarios and writes
// one trace CSV and one summary per scenario into the output directory.
//
// Exit status: 0 all scenarios ran, 1 configuration error, 2 runtime error.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "nrpursuit/config.hpp"
#include "nrpursuit/report.hpp"
#include "nrpursuit/sim.hpp"

namespace fs = std::filesystem;
using namespace nrpursuit;

namespace {

struct RunManifest {
  fs::path config;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> scenarios;  // empty: all
  bool emit_trace = true;
  bool emit_summary = true;
  unsigned parallel = 1;
};

enum Status { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

struct Job {
  ParsedScenario parsed;
  Status status = kOk;
  std::string message;
};

void run_job(Job& job, const RunManifest& m) {
  ScenarioConfig cfg = *job.parsed.config;
  if (m.seed) cfg.seed = *m.seed;
  RunResult result;
  try {
    result = run_scenario(cfg);
  } catch (const ConfigError& e) {
    job.status = kConfigError;
    job.message = e.what();
    return;
  }
  if (!result.ok) {
    job.status = kRuntimeError;
    job.message = result.error;
  }
  try {
    if (m.emit_trace) {
      const fs::path p = m.out_dir / (cfg.name + ".trace.csv");
      std::ofstream out(p, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + p.string());
      write_trace_csv(out, result.trace);
      if (!out) throw std::runtime_error("write failed for " + p.string());
    }
    if (m.emit_summary) {
      const fs::path p = m.out_dir / (cfg.name + ".summary.txt");
      std::ofstream out(p, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + p.string());
      write_summary(out, cfg, result, job.parsed.defaulted);
      if (!out) throw std::runtime_error("write failed for " + p.string());
    }
  } catch (const std::exception& e) {
    job.status = kRuntimeError;
    job.message = e.what();
  }
}

int run(const RunManifest& m) {
  std::vector<ParsedScenario> parsed;
  try {
    parsed = load_config_file(m.config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<Job> jobs;
  for (auto& p : parsed) {
    if (!m.scenarios.empty() &&
        std::find(m.scenarios.begin(), m.scenarios.end(), p.name) == m.scenarios.end()) {
      continue;
    }
    Job j;
    j.parsed = std::move(p);
    if (j.parsed.error) {
      j.status = kConfigError;
      j.message = j.parsed.error->what();
    }
    jobs.push_back(std::move(j));
  }
  if (jobs.empty()) {
    std::cerr << "no scenarios selected\n";
    return kConfigError;
  }

  std::error_code ec;
  fs::create_directories(m.out_dir, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << m.out_dir << ": " << ec.message() << '\n';
    return kRuntimeError;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      if (jobs[i].status == kOk) run_job(jobs[i], m);
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(m.parallel, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = kOk;
  for (const auto& j : jobs) {
    if (j.status == kOk) {
      std::cout << j.parsed.name << ": ok\n";
    } else {
      std::cerr << j.parsed.name << ": "
                << (j.status == kConfigError ? "config error: " : "runtime error: ") << j.message
                << '\n';
      if (status == kOk || j.status == kConfigError) status = j.status;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton-Raphson flow pursuit-evasion scenario runner"};
  RunManifest m;
  std::uint64_t seed = 0;
  bool no_trace = false;
  bool no_summary = false;
  app.add_option("--config", m.config, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", m.out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the seed of every scenario");
  app.add_option("--scenario", m.scenarios, "Run only the named scenario (repeatable)");
  app.add_flag("--no-trace", no_trace, "Do not write trace CSV files");
  app.add_flag("--no-summary", no_summary, "Do not write summary files");
  app.add_option("--parallel", m.parallel, "Run up to k scenarios concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (*seed_opt) m.seed = seed;
  m.emit_trace = !no_trace;
  m.emit_summary = !no_summary;
  return run(m);
}
