#pragma once

#include "drcvar/auction.hpp"
#include "drcvar/rho_table.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace drcvar::cli {

enum class Mode { Solve, Table, Export, Calibrate };
enum class OutputFormat { Csv, Markdown };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSolveFailure = 2;

struct RunConfig {
    Mode mode = Mode::Solve;
    /// Without an instance file the synthetic generator provides the data.
    std::optional<std::filesystem::path> instance_path;
    /// Replaces the history path named inside the instance file.
    std::optional<std::filesystem::path> history_path;
    std::filesystem::path out_dir = "out";
    auction::AuctionConfig auction;
    auction::SyntheticSpec synthetic;
    auction::TableGrid grid{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {0.0, 0.5, 1.0}};
    OutputFormat format = OutputFormat::Markdown;
    /// In table mode, also write each cell's LP file and solution report.
    bool cell_artifacts = false;

    /// Throws InputError when mode-specific requirements are not met.
    void validate() const;
};

/// Reads a TOML run configuration; relative paths inside it resolve against
/// the file's directory. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);

/// Executes one run. Status lines go to `out`, diagnostics to `err`.
/// Returns kExitOk, kExitConfigError or kExitSolveFailure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses flags (optionally layered over --config) and runs.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

/// The instance a config describes: the instance file or a synthetic draw.
auction::AuctionInstance resolve_instance(const RunConfig& config);

/// Solution report written by `solve` and by table cell artifacts.
std::string solution_report(const auction::AuctionResult& result);

Mode parse_mode(const std::string& text);
OutputFormat parse_format(const std::string& text);

} // namespace drcvar::cli
