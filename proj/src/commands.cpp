#include "coxcs/commands.hpp"

#include "coxcs/csv.hpp"
#include "coxcs/linear_expectation.hpp"
#include "coxcs/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace coxcs {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const std::string& dir, const std::string& name)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& name)
{
    out.flush();
    if (!out) throw IoError("write failed for '" + name + "'");
}

SurvivalDataset load_input(const RunConfig& config)
{
    ColumnSchema schema;
    schema.time_column = config.time_column;
    schema.status_column = config.status_column;
    auto data = read_csv(fs::path(config.input_path), schema);
    validate(data);
    return data;
}

std::string conditioning_text(const ConditioningSet& c)
{
    std::string s = "{";
    for (auto j : c.indices()) s += (s.size() > 1 ? "," : "") + std::to_string(j + 1);
    return s + "}";
}

std::string describe_threshold(const ThresholdMode& t, Index k)
{
    switch (t.kind) {
    case ThresholdMode::Kind::gamma: return "gamma=" + format_double(t.gamma);
    case ThresholdMode::Kind::top_k: return "top-" + std::to_string(k);
    case ThresholdMode::Kind::default_top_k: return "top-" + std::to_string(k) + " (n/log n)";
    }
    return "";
}

std::string config_id(const RunConfig& config, const SimConfig& sim)
{
    std::string base = config.example ? "example" + std::to_string(*config.example)
                                      : fs::path(config.sim_config_path).stem().string();
    char cr[32];
    std::snprintf(cr, sizeof cr, "%g", sim.censor_target);
    return base + "-n" + std::to_string(sim.n) + "-p" + std::to_string(sim.p) + "-cr" + cr;
}

StatisticSet statistic_set(const std::vector<Statistic>& stats)
{
    StatisticSet s{false, false, false};
    for (auto st : stats) {
        if (st == Statistic::mple) s.mple = true;
        if (st == Statistic::wald) s.wald = true;
        if (st == Statistic::plik) s.plik = true;
    }
    return s;
}

} // namespace

void RunConfig::check() const
{
    if (workers < 1) throw ConfigError("--workers must be at least 1");
    if (replicates < 1) throw ConfigError("--replicates must be at least 1");
    if (statistics.empty()) throw ConfigError("--stats names no statistic");
    if (methods.empty()) throw ConfigError("--methods names no method");
    if (threshold.kind == ThresholdMode::Kind::top_k && threshold.k < 1) throw ConfigError("--top-k must be at least 1");
    if (threshold.kind == ThresholdMode::Kind::gamma && !(threshold.gamma > 0.0 && std::isfinite(threshold.gamma)))
        throw ConfigError("--gamma must be positive");
    if (conditioning.mode == ConditioningSpec::Mode::automatic && command != Command::screen &&
        command != Command::benchmark)
        throw ConfigError("--conditioning auto is only available for screen and benchmark");
    if (censoring && !(*censoring >= 0.0 && *censoring < 1.0)) throw ConfigError("--censoring must lie in [0, 1)");
    if (example && (*example < 1 || *example > 3)) throw ConfigError("--example must be 1, 2 or 3");
    if (n && *n < 2) throw ConfigError("--n must be at least 2");
    if (p && *p < 1) throw ConfigError("--p must be at least 1");
    const bool needs_input = command == Command::screen || command == Command::diagnose;
    if (needs_input && input_path.empty()) throw ConfigError("--input is required");
    const bool needs_sim = command == Command::simulate || command == Command::benchmark || command == Command::calibrate;
    if (needs_sim && !example && sim_config_path.empty()) throw ConfigError("--example or --sim-config is required");
    if (needs_sim && example && !sim_config_path.empty())
        throw ConfigError("--example and --sim-config are mutually exclusive");
}

std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag)
{
    if (flag) return flag;
    const char* env = std::getenv("COXSCREEN_SEED");
    if (!env || !*env) return std::nullopt;
    std::string_view text(env);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("COXSCREEN_SEED is not an unsigned integer: '" + std::string(text) + "'");
    return v;
}

int exit_code(ErrorCategory category)
{
    switch (category) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::io: return 3;
    case ErrorCategory::validation: return 4;
    case ErrorCategory::fit: return 5;
    }
    return 1;
}

SimConfig simulation_config(const RunConfig& config)
{
    SimConfig sim;
    if (config.example) {
        sim = SimConfig::example(*config.example, config.n.value_or(100), config.p.value_or(1000),
                                 config.censoring.value_or(0.2), config.seed.value_or(1));
    } else {
        std::ifstream in(config.sim_config_path);
        if (!in) throw IoError("cannot open sim config '" + config.sim_config_path + "'");
        sim = read_sim_config(in);
        if (config.n) sim.n = *config.n;
        if (config.p) sim.p = *config.p;
        if (config.censoring) {
            sim.censor_target = *config.censoring;
            sim.censor_upper.reset();
        }
        if (config.seed) sim.seed = *config.seed;
    }
    sim.check();
    return sim;
}

void cmd_screen(const RunConfig& config, std::ostream& log)
{
    const auto data = load_input(config);
    ScreenOptions opts;
    opts.statistics = statistic_set(config.statistics);
    opts.workers = config.workers;
    const ConditioningSet c = config.conditioning.resolve(data, opts);
    if (config.conditioning.mode == ConditioningSpec::Mode::automatic)
        log << "conditioning: chose C=" << conditioning_text(c) << " by largest marginal Wald statistic\n";

    const auto result = screen(data, c, opts);
    log << "null fit: C=" << conditioning_text(c) << " loglik=" << format_double(result.null_fit.loglik)
        << " iterations=" << result.null_fit.iterations << '\n';
    Index counts[4] = {0, 0, 0, 0};
    for (const auto& r : result.records) ++counts[static_cast<int>(r.fit_status)];
    log << "fits: " << counts[0] << " converged, " << counts[1] << " separation, " << counts[2] << " singular, "
        << counts[3] << " not_converged\n";

    const auto& names = data.covariate_names();
    if (config.format == OutputFormat::json) {
        auto out = open_output(config.out_dir, "screening.json");
        write_screening_json(out, result, names);
        finish(out, "screening.json");
    } else {
        auto out = open_output(config.out_dir, "screening.csv");
        write_screening_csv(out, result, names);
        finish(out, "screening.csv");
    }

    const Statistic stat = config.statistics.front();
    std::vector<Index> selected;
    Index k = 0;
    switch (config.threshold.kind) {
    case ThresholdMode::Kind::gamma: selected = select_by_threshold(result, stat, config.threshold.gamma); break;
    case ThresholdMode::Kind::top_k:
        k = config.threshold.k;
        selected = select_top_k(result, stat, k);
        break;
    case ThresholdMode::Kind::default_top_k:
        k = std::min(default_top_k(data.n()), data.p() - c.size());
        selected = select_top_k(result, stat, k);
        break;
    }
    auto out = open_output(config.out_dir, "selected.csv");
    write_selection_csv(out, selected, names);
    finish(out, "selected.csv");
    log << "selected " << selected.size() << " covariates by " << describe_threshold(config.threshold, k) << " on "
        << to_string(stat) << '\n';
}

void cmd_simulate(const RunConfig& config, std::ostream& log)
{
    SimConfig sim = simulation_config(config);
    if (!sim.censor_upper && sim.censor_target > 0.0) {
        const auto cal = calibrate_censoring(sim, sim.censor_target);
        sim.censor_upper = cal.upper;
        log << "calibrated censoring bound " << format_double(cal.upper) << " (rate " << format_double(cal.achieved)
            << ")\n";
    }
    {
        auto out = open_output(config.out_dir, "sim.cfg");
        write_sim_config(out, sim);
        finish(out, "sim.cfg");
    }
    for (Index r = 0; r < config.replicates; ++r) {
        const auto rep = gen_replicate(sim, static_cast<std::uint64_t>(r));
        const std::string name = "replicate_" + std::to_string(r) + ".csv";
        auto out = open_output(config.out_dir, name);
        write_csv(out, rep.dataset);
        finish(out, name);
        log << name << ": censoring " << format_double(rep.realized_censoring);
        if (rep.clipped_predictors > 0) log << ", " << rep.clipped_predictors << " clipped predictors";
        log << '\n';
    }
}

void cmd_benchmark(const RunConfig& config, std::ostream& log)
{
    BenchmarkPlan plan;
    plan.sim = simulation_config(config);
    plan.replicates = config.replicates;
    plan.methods = config.methods;
    plan.conditioning = config.conditioning;
    plan.workers = config.workers;
    const auto outcome = run_benchmark(plan);

    log << "censoring bound " << format_double(outcome.censor_upper) << ", mean realized rate "
        << format_double(outcome.mean_realized_censoring) << '\n';
    log << "conditioning " << config.conditioning.describe() << ", " << config.replicates << " replicates, "
        << outcome.failures << " method failures\n";
    if (outcome.clipped_predictors > 0)
        log << outcome.clipped_predictors << " linear predictors clipped at +-700\n";

    const auto id = config_id(config, plan.sim);
    {
        auto out = open_output(config.out_dir, "summary.csv");
        write_summary_csv(out, outcome.summaries, id);
        finish(out, "summary.csv");
    }
    {
        auto out = open_output(config.out_dir, "scores.csv");
        write_scores_csv(out, outcome.scores);
        finish(out, "scores.csv");
    }
    if (config.format == OutputFormat::json) {
        nlohmann::json doc;
        doc["config_id"] = id;
        doc["censor_upper"] = outcome.censor_upper;
        doc["conditioning"] = config.conditioning.describe();
        doc["failures"] = outcome.failures;
        for (const auto& s : outcome.summaries)
            doc["methods"].push_back({{"method", s.method},
                                      {"median_mms", s.median_mms},
                                      {"iqr_mms", s.iqr_mms},
                                      {"median_tpr", s.median_tpr},
                                      {"iqr_tpr", s.iqr_tpr},
                                      {"sure_rate", s.sure_rate},
                                      {"replicates", s.replicates}});
        auto out = open_output(config.out_dir, "summary.json");
        out << doc.dump(2) << '\n';
        finish(out, "summary.json");
    }
    for (const auto& s : outcome.summaries)
        log << s.method << ": median MMS " << format_double(s.median_mms) << " (IQR " << format_double(s.iqr_mms)
            << "), median TPR " << format_double(s.median_tpr) << '\n';
}

void cmd_calibrate(const RunConfig& config, std::ostream& out, std::ostream& log)
{
    SimConfig sim = simulation_config(config);
    if (sim.censor_target <= 0.0) {
        log << "censoring target is 0: no censoring needed\n";
        out << "censor_upper=inf achieved=0\n";
        return;
    }
    const auto cal = calibrate_censoring(sim, sim.censor_target);
    out << "censor_upper=" << format_double(cal.upper) << " achieved=" << format_double(cal.achieved) << '\n';
}

void cmd_diagnose(const RunConfig& config, std::ostream& log)
{
    const auto data = load_input(config);
    const ConditioningSet c = config.conditioning.resolve(data, {});
    const auto& names = data.covariate_names();

    std::ostringstream body;
    nlohmann::json doc = nlohmann::json::array();
    Index rows = 0;
    body << "index,name,signal_strength\n";
    for (Index j = 0; j < data.p(); ++j) {
        if (c.contains(j)) continue;
        const double s = signal_strength(data, c, j);
        body << j + 1 << ',' << names[static_cast<std::size_t>(j)] << ',' << csv_number(s) << '\n';
        doc.push_back({{"index", j + 1}, {"name", names[static_cast<std::size_t>(j)]},
                       {"signal_strength", std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr)}});
        ++rows;
    }
    if (rows == 0) log << "warning: every covariate is in the conditioning set; nothing to diagnose\n";

    const std::string name = config.format == OutputFormat::json ? "signal_strength.json" : "signal_strength.csv";
    auto out = open_output(config.out_dir, name);
    if (config.format == OutputFormat::json)
        out << doc.dump(2) << '\n';
    else
        out << body.str();
    finish(out, name);
    log << "wrote " << rows << " signal strengths given C=" << conditioning_text(c) << '\n';
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& log)
{
    try {
        config.check();
        switch (config.command) {
        case Command::screen: cmd_screen(config, log); break;
        case Command::simulate: cmd_simulate(config, log); break;
        case Command::benchmark: cmd_benchmark(config, log); break;
        case Command::calibrate: cmd_calibrate(config, out, log); break;
        case Command::diagnose: cmd_diagnose(config, log); break;
        }
        return 0;
    } catch (const Error& e) {
        log << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::out_of_range& e) {
        log << "error[config]: " << e.what() << '\n';
        return exit_code(ErrorCategory::config);
    } catch (const std::invalid_argument& e) {
        log << "error[validation]: " << e.what() << '\n';
        return exit_code(ErrorCategory::validation);
    }
}

} // namespace coxcs
