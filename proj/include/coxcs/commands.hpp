#pragma once

#include "coxcs/benchmark.hpp"
#include "coxcs/error.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coxcs {

enum class Command { screen, simulate, benchmark, calibrate, diagnose };
enum class OutputFormat { csv, json };

struct ThresholdMode {
    enum class Kind { default_top_k, top_k, gamma };
    Kind kind = Kind::default_top_k;
    Index k = 0;
    double gamma = 0.0;
};

/// Fully resolved settings for one subcommand. Unset optionals fall back to
/// the design defaults (example settings or the sim config file).
struct RunConfig {
    Command command = Command::screen;

    std::string input_path;
    std::string time_column = "time";
    std::string status_column = "status";

    std::optional<int> example;
    std::string sim_config_path;
    std::optional<Index> n;
    std::optional<Index> p;
    std::optional<double> censoring;
    Index replicates = 1;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};

    ConditioningSpec conditioning{};
    /// Requested statistics in request order; the first one drives selection.
    std::vector<Statistic> statistics{Statistic::mple};
    ThresholdMode threshold{};
    /// Unset: the sim config file's seed, else 1.
    std::optional<std::uint64_t> seed;
    int workers = 1;

    std::string out_dir = ".";
    OutputFormat format = OutputFormat::csv;

    void check() const;
};

/// Flag value, else COXSCREEN_SEED when set. A malformed environment value is a ConfigError.
std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag);

/// Exit status for each error category; 1 is reserved for unexpected failures.
int exit_code(ErrorCategory category);

/// SimConfig described by the example/config-file settings of `config`.
SimConfig simulation_config(const RunConfig& config);

void cmd_screen(const RunConfig& config, std::ostream& log);
void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_benchmark(const RunConfig& config, std::ostream& log);
void cmd_calibrate(const RunConfig& config, std::ostream& out, std::ostream& log);
void cmd_diagnose(const RunConfig& config, std::ostream& log);

/// Dispatches and converts errors into a one-line "error[category]: message"
/// on `log`, returning the exit status.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& log);

} // namespace coxcs
