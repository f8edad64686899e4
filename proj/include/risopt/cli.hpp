#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "risopt/simulation.hpp"

namespace risopt::cli {

enum class Subcommand { Single, SweepSnr, SweepN, SweepM, Gradcheck };
enum class OutputFormat { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Usage or configuration problem; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliInvocation {
    Subcommand subcommand = Subcommand::Single;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> realizations;
    std::optional<std::string> out;
    std::optional<OutputFormat> format;
    std::optional<double> snr_db;
    std::optional<int> threads;
    int verbosity = 0;
};

/// Everything read from a config file.
struct FileConfig {
    SimulationConfig sim;
    std::vector<double> snr_db_values{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<double> n_values{4.0, 8.0, 16.0, 32.0};
    std::vector<double> m_values{2.0, 4.0, 6.0, 8.0};
    int gradcheck_instances = 50;
    double gradcheck_eps = 1e-5;
};

inline constexpr int kSchemaVersion = 1;

/// Parses config JSON text. Unknown keys and wrongly typed values throw
/// UsageError naming the key.
FileConfig parse_config(const std::string& text);
FileConfig load_config(const std::string& path);

/// Throws UsageError (message includes usage text) on bad arguments.
/// Returns std::nullopt when help was requested.
std::optional<CliInvocation> parse_invocation(const std::vector<std::string>& args);

std::string usage();

/// Executes a parsed invocation, returning the process exit code.
int run(const CliInvocation& inv);

/// parse_invocation + run with exit-code mapping and error reporting.
int main_entry(int argc, char** argv);

}  // namespace risopt::cli
