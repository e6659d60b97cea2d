#include "coxcs/benchmark.hpp"

#include "coxcs/baselines.hpp"
#include "coxcs/error.hpp"
#include "coxcs/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

namespace coxcs {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

struct ReplicateOutcome {
    std::vector<ReplicateScore> scores; // one per method
    double realized = 0.0;
    Index clipped = 0;
    Index failures = 0;
};

} // namespace

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::cs_mple: return "CS-MPLE";
    case Method::cs_wald: return "CS-Wald";
    case Method::cs_plik: return "CS-PLIK";
    case Method::psis_wald: return "PSIS-Wald";
    case Method::psis_plik: return "PSIS-PLIK";
    case Method::cors: return "CORS";
    case Method::cris: return "CRIS";
    }
    return "?";
}

Method parse_method(std::string_view text)
{
    const auto key = lower(trim(text));
    for (auto m : kAllMethods)
        if (lower(to_string(m)) == key) return m;
    throw ConfigError("unknown method '" + std::string(text) +
                      "' (expected CS-MPLE, CS-Wald, CS-PLIK, PSIS-Wald, PSIS-PLIK, CORS or CRIS)");
}

bool is_conditional(Method m)
{
    return m == Method::cs_mple || m == Method::cs_wald || m == Method::cs_plik;
}

ConditioningSpec ConditioningSpec::parse(std::string_view text)
{
    const auto t = lower(trim(text));
    if (t == "none" || t.empty()) return {Mode::none, {}};
    if (t == "auto") return {Mode::automatic, {}};
    ConditioningSpec spec{Mode::list, {}};
    std::string_view rest = t;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || v < 1)
            throw ConfigError("bad conditioning entry '" + item + "' (expected 1-based indices, 'auto' or 'none')");
        spec.indices.push_back(static_cast<Index>(v - 1));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    std::sort(spec.indices.begin(), spec.indices.end());
    if (std::adjacent_find(spec.indices.begin(), spec.indices.end()) != spec.indices.end())
        throw ConfigError("conditioning list repeats an index");
    return spec;
}

ConditioningSet ConditioningSpec::resolve(const SurvivalDataset& dataset, const ScreenOptions& options) const
{
    switch (mode) {
    case Mode::none: return ConditioningSet{};
    case Mode::automatic: return default_conditioning(dataset, options);
    case Mode::list: {
        ConditioningSet c(indices);
        c.check(dataset);
        return c;
    }
    }
    return ConditioningSet{};
}

std::string ConditioningSpec::describe() const
{
    if (mode == Mode::none) return "none";
    if (mode == Mode::automatic) return "auto";
    std::string s;
    for (auto j : indices) s += (s.empty() ? "" : ",") + std::to_string(j + 1);
    return s;
}

ReplicateRankings rank_replicate(const SurvivalDataset& dataset, const std::vector<Method>& methods,
                                 const ConditioningSpec& conditioning, const FitControl& control)
{
    ReplicateRankings out;
    out.rankings.resize(methods.size());
    out.errors.resize(methods.size());
    ScreenOptions opts;
    opts.control = control;

    const bool any_cs = std::any_of(methods.begin(), methods.end(), is_conditional);
    const bool any_psis = std::any_of(methods.begin(), methods.end(),
                                      [](Method m) { return m == Method::psis_wald || m == Method::psis_plik; });

    std::optional<ScreeningResult> cs, marginal;
    std::string cs_error, marginal_error;
    if (any_cs) {
        try {
            out.conditioning = conditioning.resolve(dataset, opts);
            ScreenOptions o = opts;
            o.statistics = StatisticSet::all();
            cs = screen(dataset, out.conditioning, o);
        } catch (const FitError& e) {
            cs_error = e.what();
        }
    }
    if (any_psis) {
        try {
            ScreenOptions o = opts;
            o.statistics = StatisticSet{false, true, true};
            marginal = screen(dataset, ConditioningSet{}, o);
        } catch (const FitError& e) {
            marginal_error = e.what();
        }
    }

    for (std::size_t k = 0; k < methods.size(); ++k) {
        const Method m = methods[k];
        switch (m) {
        case Method::cs_mple:
        case Method::cs_wald:
        case Method::cs_plik: {
            if (!cs) {
                out.errors[k] = cs_error;
                break;
            }
            const Statistic s = m == Method::cs_mple ? Statistic::mple
                                : m == Method::cs_wald ? Statistic::wald
                                                       : Statistic::plik;
            out.rankings[k] = cs->ranking(s);
            break;
        }
        case Method::psis_wald:
        case Method::psis_plik:
            if (!marginal) {
                out.errors[k] = marginal_error;
                break;
            }
            out.rankings[k] =
                psis_from_screen(*marginal, m == Method::psis_wald ? PsisFlavor::wald : PsisFlavor::plik).ranking;
            break;
        case Method::cors: out.rankings[k] = cors(dataset).ranking; break;
        case Method::cris: out.rankings[k] = cris(dataset).ranking; break;
        }
    }
    return out;
}

BenchmarkOutcome run_benchmark(const BenchmarkPlan& plan)
{
    if (plan.replicates < 1) throw ConfigError("replicate count must be at least 1");
    if (plan.workers < 1) throw ConfigError("worker count must be at least 1");
    if (plan.methods.empty()) throw ConfigError("no methods requested");
    plan.control.check();

    BenchmarkOutcome outcome;
    SimConfig sim = plan.sim;
    sim.check();
    if (!sim.censor_upper && plan.calibrate && sim.censor_target > 0.0) {
        const auto cal = calibrate_censoring(sim, sim.censor_target);
        sim.censor_upper = cal.upper;
        outcome.calibrated_rate = cal.achieved;
    }
    outcome.censor_upper = sim.censor_upper.value_or(std::numeric_limits<double>::infinity());

    const Index tpr_budget = plan.tpr_budget > 0 ? plan.tpr_budget : sim.n;
    const Index sure_k = plan.sure_k > 0 ? plan.sure_k : default_top_k(sim.n);

    std::vector<ReplicateOutcome> reps(static_cast<std::size_t>(plan.replicates));
    parallel_for(plan.replicates, plan.workers, [&](std::ptrdiff_t r) {
        const auto id = static_cast<std::uint64_t>(r);
        const SimReplicate rep = gen_replicate(sim, id);
        auto& slot = reps[static_cast<std::size_t>(r)];
        slot.realized = rep.realized_censoring;
        slot.clipped = rep.clipped_predictors;
        const auto ranked = rank_replicate(rep.dataset, plan.methods, plan.conditioning, plan.control);
        for (std::size_t k = 0; k < plan.methods.size(); ++k) {
            const Method m = plan.methods[k];
            ReplicateScore sc;
            sc.method = std::string(to_string(m));
            sc.replicate_id = id;
            const ConditioningSet c = is_conditional(m) ? ranked.conditioning : ConditioningSet{};
            const auto& ranking = ranked.rankings[k];
            if (ranking.empty()) {
                ++slot.failures;
                sc.mms = sim.p;
                sc.tpr = tpr({}, rep.true_active, tpr_budget, c);
                sc.sure_screened = false;
            } else {
                sc.mms = mms(ranking, rep.true_active, c, c.size());
                sc.tpr = tpr(ranking, rep.true_active, tpr_budget, c);
                sc.sure_screened = sure_screened(ranking, rep.true_active, sure_k, c);
            }
            slot.scores.push_back(std::move(sc));
        }
    });

    double realized = 0.0;
    for (const auto& rep : reps) {
        realized += rep.realized;
        outcome.failures += rep.failures;
        outcome.clipped_predictors += rep.clipped;
    }
    outcome.mean_realized_censoring = realized / static_cast<double>(plan.replicates);

    for (std::size_t k = 0; k < plan.methods.size(); ++k) {
        const auto first = outcome.scores.size();
        for (const auto& rep : reps) outcome.scores.push_back(rep.scores[k]);
        outcome.summaries.push_back(
            summarize(std::span<const ReplicateScore>(outcome.scores.data() + first, outcome.scores.size() - first)));
    }
    return outcome;
}

} // namespace coxcs
