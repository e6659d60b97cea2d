// coxscreen: conditional screening for the Cox model.
//
//   coxscreen screen    --input data.csv --conditioning auto --stats mple,wald --out res/
//   coxscreen simulate  --example 1 --n 100 --p 1000 --censoring 0.2 --replicates 5 --out sim/
//   coxscreen benchmark --example 2 --replicates 100 --workers 4 --out bench/
//   coxscreen calibrate --example 1 --censoring 0.6
//   coxscreen diagnose  --input data.csv --conditioning 1 --out diag/
//
// Every subcommand also accepts --config FILE with flat key=value lines using
// the long flag names; flags given on the command line win.

#include "coxcs/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace coxcs;

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

struct Flags {
    std::string conditioning;
    std::string stats = "mple";
    std::string methods;
    std::string format = "csv";
    std::optional<double> gamma;
    std::optional<long long> top_k;
    std::optional<int> example;
    std::optional<long long> n, p;
    std::optional<double> censoring;
    long long replicates = 0;
    std::optional<std::uint64_t> seed;
};

// Expands "--config FILE" into --key=value arguments placed ahead of the
// explicit flags, so the command line overrides the file.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    std::vector<std::string> settings;
    for (std::size_t k = 1; k < args.size(); ++k) {
        std::string path;
        if (args[k] == "--config" && k + 1 < args.size()) {
            path = args[k + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + 2));
        } else if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
            continue;
        }
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
            auto key = line.substr(first, eq - first);
            key.erase(key.find_last_not_of(" \t") + 1);
            auto value = line.substr(eq + 1);
            value.erase(0, value.find_first_not_of(" \t"));
            value.erase(value.find_last_not_of(" \t\r") + 1);
            settings.push_back("--" + key + "=" + value);
        }
        --k;
    }
    if (!settings.empty() && args.size() > 1) args.insert(args.begin() + 2, settings.begin(), settings.end());
    return args;
}

void add_common(CLI::App* cmd, RunConfig& cfg, Flags& f)
{
    cmd->add_option("--seed", f.seed, "Random seed (fallback: COXSCREEN_SEED, then 1)");
    cmd->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
    cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_input(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--input", cfg.input_path, "Input CSV")->required();
    cmd->add_option("--time-col", cfg.time_column, "Observed time column")->capture_default_str();
    cmd->add_option("--status-col", cfg.status_column, "Event indicator column")->capture_default_str();
}

void add_sim(CLI::App* cmd, RunConfig& cfg, Flags& f)
{
    auto* ex = cmd->add_option("--example", f.example, "Built-in design (1, 2 or 3)");
    auto* file = cmd->add_option("--sim-config", cfg.sim_config_path, "Simulation config file");
    ex->excludes(file);
    cmd->add_option("--n", f.n, "Sample size (default 100 for examples)");
    cmd->add_option("--p", f.p, "Number of covariates (default 1000 for examples)");
    cmd->add_option("--censoring", f.censoring, "Target censoring rate in [0, 1) (default 0.2 for examples)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Conditional variable screening for the Cox proportional hazards model"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    RunConfig cfg;
    Flags f;

    auto* screen = app.add_subcommand("screen", "Screen covariates of a survival data set");
    add_input(screen, cfg);
    screen->add_option("--conditioning", f.conditioning, "1-based comma list, 'auto' or 'none' (default auto)");
    screen->add_option("--stats", f.stats, "Statistics: mple,wald,plik; the first drives selection")->capture_default_str();
    auto* gamma = screen->add_option("--gamma", f.gamma, "Keep covariates whose statistic reaches gamma");
    auto* topk = screen->add_option("--top-k", f.top_k, "Keep the k top-ranked covariates (default n/log n)");
    gamma->excludes(topk);
    add_common(screen, cfg, f);

    auto* simulate = app.add_subcommand("simulate", "Write simulated replicates as CSV");
    add_sim(simulate, cfg, f);
    simulate->add_option("--replicates", f.replicates, "Replicates to write (default 1)");
    add_common(simulate, cfg, f);

    auto* bench = app.add_subcommand("benchmark", "Score screening methods on simulated replicates");
    add_sim(bench, cfg, f);
    bench->add_option("--replicates", f.replicates, "Replicates (default 100)");
    bench->add_option("--methods", f.methods, "Comma list (default all: CS-MPLE,CS-Wald,CS-PLIK,PSIS-Wald,PSIS-PLIK,CORS,CRIS)");
    bench->add_option("--conditioning", f.conditioning, "Conditioning for CS methods (default 1)");
    add_common(bench, cfg, f);

    auto* calibrate = app.add_subcommand("calibrate", "Find the censoring bound for a target rate");
    add_sim(calibrate, cfg, f);
    add_common(calibrate, cfg, f);

    auto* diagnose = app.add_subcommand("diagnose", "Per-covariate signal strength given the conditioning set");
    add_input(diagnose, cfg);
    diagnose->add_option("--conditioning", f.conditioning, "1-based comma list or 'none' (default none)");
    add_common(diagnose, cfg, f);

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);

    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[config]: " << e.what() << '\n';
        return exit_code(ErrorCategory::config);
    }

    try {
        if (screen->parsed()) cfg.command = Command::screen;
        else if (simulate->parsed()) cfg.command = Command::simulate;
        else if (bench->parsed()) cfg.command = Command::benchmark;
        else if (calibrate->parsed()) cfg.command = Command::calibrate;
        else cfg.command = Command::diagnose;

        std::string cond = f.conditioning;
        if (cond.empty()) cond = cfg.command == Command::screen ? "auto" : cfg.command == Command::benchmark ? "1" : "none";
        cfg.conditioning = ConditioningSpec::parse(cond);

        cfg.statistics.clear();
        for (const auto& s : split(f.stats)) cfg.statistics.push_back(parse_statistic(s));
        if (!f.methods.empty()) {
            cfg.methods.clear();
            for (const auto& m : split(f.methods)) cfg.methods.push_back(parse_method(m));
        }
        if (f.gamma) cfg.threshold = {ThresholdMode::Kind::gamma, 0, *f.gamma};
        if (f.top_k) cfg.threshold = {ThresholdMode::Kind::top_k, static_cast<Index>(*f.top_k), 0.0};
        cfg.example = f.example;
        if (f.n) cfg.n = static_cast<Index>(*f.n);
        if (f.p) cfg.p = static_cast<Index>(*f.p);
        cfg.censoring = f.censoring;
        cfg.replicates = f.replicates > 0 ? f.replicates : cfg.command == Command::benchmark ? 100 : 1;
        if (f.replicates < 0) cfg.replicates = f.replicates;
        cfg.format = f.format == "json" ? OutputFormat::json : OutputFormat::csv;
        cfg.seed = resolve_seed(f.seed);
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    }

    return run_command(cfg, std::cout, std::cerr);
}
