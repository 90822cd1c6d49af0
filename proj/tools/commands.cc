// Copyright 2026 The agesim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <algorithm>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "agesim/config.h"
#include "agesim/errors.h"
#include "agesim/ingest.h"
#include "agesim/report.h"
#include "agesim/scenario.h"

namespace agesim::cli {
namespace {

namespace fs = std::filesystem;

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << content;
  out.close();
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
}

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
}

std::string SeriesCsv(const ScenarioReport& report,
                      const std::vector<std::string>& names) {
  std::vector<IndicatorSeries> series;
  for (const std::string& name : names) {
    if (const IndicatorReport* ind = report.Find(name)) series.push_back(ind->series);
  }
  std::ostringstream out;
  WriteCsv(out, series);
  return out.str();
}

void WriteScenario(const ScenarioReport& report, const fs::path& dir,
                   bool exclude_overload) {
  MakeDirs(dir);
  const ReportBundle bundle = BundleFor(report, exclude_overload);
  WriteFile(dir / "report.json", ScenarioReportJson(report, exclude_overload));
  WriteFile(dir / "config.json", ScenarioConfigToJson(report.config));
  WriteFile(dir / "trend_table.txt", FormatTables(bundle));
  WriteFile(dir / "workload_duration.csv",
            SeriesCsv(report, {std::string(kDurationIndicator)}));
  WriteFile(dir / "memory_available.csv",
            SeriesCsv(report, {std::string(kMemoryIndicator)}));
  WriteFile(dir / "swap_used.csv", SeriesCsv(report, {std::string(kSwapIndicator)}));
  std::vector<std::string> disk = {std::string(kDiskIndicator)};
  for (const NodeSpec& node : report.config.nodes.empty()
                                  ? DefaultNodes(report.config.topology)
                                  : report.config.nodes) {
    disk.push_back(NodeDiskIndicator(node.name));
  }
  WriteFile(dir / "disk_used.csv", SeriesCsv(report, disk));
  WriteFile(dir / "errors.csv", ErrorLogCsv(report.errors));
  WriteFile(dir / "workloads.json", WorkloadReportJson(report.workloads));
}

void PrintSummary(const ScenarioReport& report, std::ostream& out) {
  const ScenarioTotals& t = report.totals;
  out << fmt::format(
      "scenario {} ({}, concurrency {}, seed {}): {} workloads, {} ok, {} "
      "failed",
      report.config.scenario_id, TopologyName(report.config.topology),
      report.config.concurrency, report.config.seed, t.workloads, t.success,
      t.workloads - t.success);
  if (report.failure_point) {
    out << fmt::format(", failed at hour {:.2f}",
                       *report.failure_point / kSecondsPerHour);
  }
  out << '\n';
}

// Maps library errors to exit codes.
template <typename F>
int Guard(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DuplicateTimestampError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const EmptyFileError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int CmdRun(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    ScenarioConfig config = LoadScenarioConfig(options.config);
    if (options.seed) config.seed = *options.seed;
    if (options.policy) {
      auto policy = ParsePolicy(*options.policy);
      if (!policy) throw ConfigError(fmt::format("unknown policy '{}'", *options.policy));
      config.policy = *policy;
    }
    if (options.phases) config.phases = ParsePhaseList(*options.phases);
    const ScenarioReport report = RunScenario(config);
    WriteScenario(report, options.out, options.exclude_overload);
    PrintSummary(report, out);
    out << FormatTrendTable(BundleFor(report, options.exclude_overload));
    return kExitOk;
  });
}

int CmdSuite(const SuiteOptions& options, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    if (options.standard_matrix == options.config_dir.has_value()) {
      throw ConfigError("pass exactly one of --standard-matrix and --config-dir");
    }
    std::vector<ScenarioConfig> configs;
    std::vector<std::string> names;
    std::vector<std::string> load_errors;
    if (options.standard_matrix) {
      configs = StandardMatrix(options.seed.value_or(1));
      for (const ScenarioConfig& c : configs) {
        names.push_back(fmt::format("scenario-{:02}", c.scenario_id));
      }
    } else {
      std::error_code ec;
      if (!fs::is_directory(*options.config_dir, ec)) {
        throw IoError(fmt::format("not a directory: {}", options.config_dir->string()));
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(*options.config_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) {
        try {
          ScenarioConfig c = LoadScenarioConfig(file);
          if (options.seed) c.seed = *options.seed;
          configs.push_back(std::move(c));
          names.push_back(file.stem().string());
        } catch (const Error& e) {
          load_errors.push_back(fmt::format("{}: {}", file.string(), e.what()));
        }
      }
    }

    MakeDirs(options.out);
    const std::vector<SuiteEntry> entries = RunSuite(configs, options.jobs);
    ReportBundle combined;
    combined.exclude_overload = options.exclude_overload;
    std::vector<ErrorLogEntry> all_errors;
    int completed = 0;
    for (const std::string& e : load_errors) err << "config error: " << e << '\n';
    for (size_t i = 0; i < entries.size(); ++i) {
      const SuiteEntry& entry = entries[i];
      if (!entry.report) {
        err << fmt::format("{}: {}\n", names[i], entry.error);
        continue;
      }
      WriteScenario(*entry.report, options.out / names[i], options.exclude_overload);
      const ReportBundle one = BundleFor(*entry.report, options.exclude_overload);
      combined.trends.insert(combined.trends.end(), one.trends.begin(), one.trends.end());
      combined.ageing.insert(combined.ageing.end(), one.ageing.begin(), one.ageing.end());
      all_errors.insert(all_errors.end(), entry.report->errors.begin(),
                        entry.report->errors.end());
      PrintSummary(*entry.report, out);
      ++completed;
    }
    AddErrors(combined, all_errors);
    WriteFile(options.out / "trend_table.txt", FormatTables(combined));
    WriteFile(options.out / "suite.json", BundleJson(combined));
    out << FormatTrendTable(combined);
    if (completed == 0) {
      err << "no scenario completed\n";
      return kExitFailure;
    }
    return kExitOk;
  });
}

int CmdAnalyze(const AnalyzeOptions& options, std::ostream& out,
               std::ostream& err) {
  return Guard(err, [&] {
    if (options.series.empty() && !options.workload_report) {
      throw ConfigError("nothing to analyze: pass --series or --workload-report");
    }
    std::vector<IndicatorSeries> series;
    for (const fs::path& file : options.series) {
      std::vector<IndicatorSeries> part = IngestCsvFile(file, options.metric);
      for (IndicatorSeries& s : part) series.push_back(std::move(s));
    }

    double origin = std::numeric_limits<double>::infinity();
    if (options.origin) {
      origin = *options.origin;
    } else {
      for (const IndicatorSeries& s : series) {
        if (!s.samples.empty()) origin = std::min(origin, s.samples.front().timestamp);
      }
    }
    std::optional<IngestedWorkloads> workloads;
    if (options.workload_report) {
      if (!std::isfinite(origin)) {
        workloads = IngestWorkloadReportFile(*options.workload_report, 0.0);
        double first = std::numeric_limits<double>::infinity();
        for (const Sample& s : workloads->durations.samples) first = std::min(first, s.timestamp);
        for (const ErrorLogEntry& e : workloads->errors) first = std::min(first, e.time);
        origin = std::isfinite(first) ? first : 0.0;
      }
      workloads = IngestWorkloadReportFile(*options.workload_report, origin);
      if (workloads->rejected > 0) {
        err << fmt::format("warning: skipped {} workload records with end < start\n",
                           workloads->rejected);
      }
    }
    if (!std::isfinite(origin)) origin = 0.0;
    for (IndicatorSeries& s : series) {
      for (Sample& sample : s.samples) sample.timestamp -= origin;
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<PhaseSpan> timeline;
    if (options.stress_end) {
      const double stress_end = *options.stress_end;
      const double rejuvenation_end =
          options.rejuvenation_end.value_or(stress_end + kSecondsPerHour);
      if (rejuvenation_end < stress_end) {
        throw ConfigError("--rejuvenation-end precedes --stress-end");
      }
      timeline = {{Phase::kStress, 0.0, stress_end},
                  {Phase::kRejuvenation, stress_end, rejuvenation_end},
                  {Phase::kPostRejuvenation, rejuvenation_end, kInf}};
    } else {
      if (options.rejuvenation_end) {
        throw ConfigError("--rejuvenation-end requires --stress-end");
      }
      timeline = {{Phase::kStress, 0.0, kInf}};
    }

    ReportBundle bundle;
    bundle.exclude_overload = options.exclude_overload;
    std::vector<IndicatorReport> reports;
    for (IndicatorSeries& s : series) {
      ValidateSeries(s);
      reports.push_back(AnalyzeIndicator(std::move(s), timeline));
    }
    if (workloads) {
      reports.push_back(AnalyzeIndicator(workloads->durations, timeline));
    }
    AddIndicators(bundle, "input", reports);
    if (workloads) AddErrors(bundle, workloads->errors);

    out << FormatTables(bundle);
    if (options.json_out) WriteFile(*options.json_out, BundleJson(bundle));
    return kExitOk;
  });
}

int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Software ageing simulator and trend analysis"};
  app.name("agesim");
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario");
  run_cmd->add_option("--config", run.config, "Scenario config (JSON)")->required();
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_option("--policy", run.policy, "wait | rejuvenate-on-failure");
  run_cmd->add_option("--phases", run.phases,
                      "Phase list, e.g. stress:24,wait:2,stress:24,rejuvenation,post:1");
  run_cmd->add_flag("--exclude-overload-errors,!--include-overload-errors",
                    run.exclude_overload,
                    "Leave SecurityGroup quota errors out of error shares");

  SuiteOptions suite;
  CLI::App* suite_cmd = app.add_subcommand("suite", "Run a batch of scenarios");
  suite_cmd->add_flag("--standard-matrix", suite.standard_matrix,
                      "The standard 12-scenario matrix");
  suite_cmd->add_option("--config-dir", suite.config_dir,
                        "Directory of scenario configs (*.json)");
  suite_cmd->add_option("--out", suite.out, "Output directory");
  suite_cmd->add_option("--seed", suite.seed, "Seed for every scenario");
  suite_cmd->add_option("--jobs", suite.jobs, "Worker threads (0 = all cores)");
  suite_cmd->add_flag("--exclude-overload-errors,!--include-overload-errors",
                      suite.exclude_overload,
                      "Leave SecurityGroup quota errors out of error shares");

  AnalyzeOptions analyze;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Trend analysis of collected series");
  analyze_cmd->add_option("--series", analyze.series, "Sample CSV files");
  analyze_cmd->add_option("--workload-report", analyze.workload_report,
                          "Workload report (JSON)");
  analyze_cmd->add_option("--metric", analyze.metric, "Only this metric");
  analyze_cmd->add_option("--stress-end", analyze.stress_end,
                          "End of the stress phase, seconds after the origin");
  analyze_cmd->add_option("--rejuvenation-end", analyze.rejuvenation_end,
                          "End of rejuvenation, seconds after the origin");
  analyze_cmd->add_option("--origin", analyze.origin,
                          "Epoch seconds of the experiment start");
  analyze_cmd->add_option("--json", analyze.json_out, "Write the bundle as JSON");
  analyze_cmd->add_flag("--exclude-overload-errors,!--include-overload-errors",
                        analyze.exclude_overload,
                        "Leave SecurityGroup quota errors out of error shares");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  if (*run_cmd) return CmdRun(run, out, err);
  if (*suite_cmd) return CmdSuite(suite, out, err);
  return CmdAnalyze(analyze, out, err);
}

}  // namespace agesim::cli
