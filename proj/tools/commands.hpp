#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ins::cli {

// Exit codes: 0 success, 1 domain failure, 2 input or usage failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitInput = 2;

enum class ReportFormat { Table, Structured };

struct CliConfig {
    std::filesystem::path story_path;
    std::vector<std::string> managers;
    int n_runs = 100;
    std::uint64_t master_seed = 42;
    int max_steps = 1000;
    std::optional<std::filesystem::path> output_dir;
    bool snapshots = true;
    ReportFormat format = ReportFormat::Table;
};

int cmd_validate(const std::filesystem::path& story_path, std::ostream& out, std::ostream& err);

// Writes report.json, report.csv and traces.jsonl when output_dir is set.
int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err);

// Writes <manager>.report.json, <manager>.traces.jsonl and compare.csv when
// output_dir is set. An empty manager list means vanilla, fairy and mimesis.
int cmd_compare(const CliConfig& config, std::ostream& out, std::ostream& err);

int cmd_oracle(const std::filesystem::path& story_path, std::ostream& out, std::ostream& err);

// Line-oriented session: an action index, an empty line for inaction, or `q`.
int cmd_play(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace ins::cli
