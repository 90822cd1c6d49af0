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

#ifndef AGESIM_TOOLS_COMMANDS_H_
#define AGESIM_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace agesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = "agesim-out";
  std::optional<uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::string> phases;
  bool exclude_overload = true;
};

struct SuiteOptions {
  bool standard_matrix = false;
  std::optional<std::filesystem::path> config_dir;
  std::filesystem::path out = "agesim-suite";
  std::optional<uint64_t> seed;
  unsigned jobs = 0;
  bool exclude_overload = true;
};

struct AnalyzeOptions {
  std::vector<std::filesystem::path> series;
  std::optional<std::filesystem::path> workload_report;
  std::optional<std::string> metric;
  // Seconds after the origin.
  std::optional<double> stress_end;
  std::optional<double> rejuvenation_end;
  // Epoch seconds subtracted from every timestamp; defaults to the earliest
  // timestamp seen.
  std::optional<double> origin;
  std::optional<std::filesystem::path> json_out;
  bool exclude_overload = true;
};

int CmdRun(const RunOptions& options, std::ostream& out, std::ostream& err);
int CmdSuite(const SuiteOptions& options, std::ostream& out, std::ostream& err);
int CmdAnalyze(const AnalyzeOptions& options, std::ostream& out,
               std::ostream& err);

// Parses the command line and dispatches.
int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace agesim::cli

#endif  // AGESIM_TOOLS_COMMANDS_H_
