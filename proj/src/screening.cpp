#include "coxcs/screening.hpp"

#include "coxcs/error.hpp"
#include "coxcs/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace coxcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t slot(Statistic s) { return static_cast<std::size_t>(s); }

CovariateScreenRecord screen_one(const SurvivalDataset& dataset, const RiskSetView& risk,
                                 const ConditioningSet& conditioning, const CoxFit& null_fit, Index j,
                                 const ScreenOptions& options)
{
    const Index q = conditioning.size();
    std::vector<Index> columns = conditioning.indices();
    columns.push_back(j);

    Eigen::VectorXd init(q + 1);
    init.head(q) = null_fit.coefficients;
    init[q] = 0.0;

    CovariateScreenRecord rec;
    rec.index = j;
    try {
        const CoxProblem problem(dataset, risk, columns);
        const CoxFit f = fit(problem, options.control, init);
        rec.iterations = f.iterations;
        rec.conditioning_coefficients = f.coefficients.head(q);
        if (!f.converged) {
            rec.fit_status = FitStatus::not_converged;
            rec.message = "Newton iterations did not converge";
        } else {
            rec.beta_hat = f.coefficients[q];
            rec.sigma_hat = std::sqrt(variance_of_last_coordinate(f));
            const auto& s = options.statistics;
            rec.wald = s.wald ? std::abs(rec.beta_hat) / rec.sigma_hat : kNaN;
            rec.plik = s.plik ? f.loglik - null_fit.loglik : kNaN;
            return rec;
        }
    } catch (const FitError& e) {
        rec.fit_status = e.kind() == FitError::Kind::singular ? FitStatus::singular : FitStatus::separation;
        rec.message = e.what();
    }
    rec.beta_hat = rec.sigma_hat = rec.wald = rec.plik = kNaN;
    return rec;
}

} // namespace

std::string_view to_string(Statistic s)
{
    switch (s) {
    case Statistic::mple: return "mple";
    case Statistic::wald: return "wald";
    case Statistic::plik: return "plik";
    }
    return "?";
}

Statistic parse_statistic(std::string_view text)
{
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto s : kAllStatistics)
        if (key == to_string(s)) return s;
    throw ConfigError("unknown statistic '" + std::string(text) + "' (expected mple, wald or plik)");
}

std::string_view to_string(FitStatus s)
{
    switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::separation: return "separation";
    case FitStatus::singular: return "singular";
    case FitStatus::not_converged: return "not_converged";
    }
    return "?";
}

bool StatisticSet::contains(Statistic s) const
{
    switch (s) {
    case Statistic::mple: return mple;
    case Statistic::wald: return wald;
    case Statistic::plik: return plik;
    }
    return false;
}

StatisticSet StatisticSet::only(Statistic s)
{
    return {s == Statistic::mple, s == Statistic::wald, s == Statistic::plik};
}

const std::vector<Index>& ScreeningResult::ranking(Statistic s) const
{
    if (!statistics.contains(s))
        throw ConfigError("statistic '" + std::string(to_string(s)) + "' was not computed");
    return rankings[slot(s)];
}

double ScreeningResult::value(const CovariateScreenRecord& record, Statistic s) const
{
    if (!statistics.contains(s))
        throw ConfigError("statistic '" + std::string(to_string(s)) + "' was not computed");
    if (!record.ok()) return kNaN;
    switch (s) {
    case Statistic::mple: return std::abs(record.beta_hat);
    case Statistic::wald: return record.wald;
    case Statistic::plik: return record.plik;
    }
    return kNaN;
}

std::vector<Index> rank_descending(const std::vector<Index>& indices, const std::vector<double>& scores)
{
    std::vector<std::size_t> order(indices.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool fa = std::isnan(scores[a]);
        const bool fb = std::isnan(scores[b]);
        if (fa != fb) return fb;
        if (!fa && scores[a] != scores[b]) return scores[a] > scores[b];
        return indices[a] < indices[b];
    });
    std::vector<Index> out;
    out.reserve(order.size());
    for (auto k : order) out.push_back(indices[k]);
    return out;
}

ScreeningResult screen(const SurvivalDataset& dataset, const ConditioningSet& conditioning,
                       const ScreenOptions& options)
{
    conditioning.check(dataset);
    options.control.check();
    if (options.workers < 1) throw ConfigError("worker count must be at least 1");
    if (conditioning.size() + 1 >= dataset.event_count())
        throw ValidationError("need more than q + 1 = " + std::to_string(conditioning.size() + 1) +
                              " events, have " + std::to_string(dataset.event_count()));

    const RiskSetView risk = build_risk_sets(dataset);

    ScreeningResult result;
    result.conditioning = conditioning;
    result.statistics = options.statistics;
    result.null_fit = fit(CoxProblem(dataset, risk, conditioning.indices()), options.control);
    if (!result.null_fit.converged)
        throw FitError(FitError::Kind::numeric, "conditioning-only model did not converge");

    std::vector<Index> candidates;
    for (Index j = 0; j < dataset.p(); ++j)
        if (!conditioning.contains(j)) candidates.push_back(j);

    result.records.resize(candidates.size());
    parallel_for(static_cast<std::ptrdiff_t>(candidates.size()), options.workers, [&](std::ptrdiff_t k) {
        const auto uk = static_cast<std::size_t>(k);
        result.records[uk] = screen_one(dataset, risk, conditioning, result.null_fit, candidates[uk], options);
    });

    for (auto s : kAllStatistics) {
        if (!options.statistics.contains(s)) continue;
        std::vector<double> scores;
        scores.reserve(result.records.size());
        for (const auto& rec : result.records) scores.push_back(result.value(rec, s));
        result.rankings[slot(s)] = rank_descending(candidates, scores);
    }
    return result;
}

std::vector<Index> select_by_threshold(const ScreeningResult& result, Statistic statistic, double gamma)
{
    if (!(gamma > 0.0)) throw ConfigError("threshold gamma must be positive");
    std::vector<Index> out;
    for (const auto& rec : result.records) {
        const double v = result.value(rec, statistic);
        if (v >= gamma) out.push_back(rec.index);
    }
    return out;
}

std::vector<Index> select_top_k(const ScreeningResult& result, Statistic statistic, Index k)
{
    const auto& r = result.ranking(statistic);
    if (k < 1 || k > static_cast<Index>(r.size()))
        throw ConfigError("top-k must lie in [1, " + std::to_string(r.size()) + "], got " + std::to_string(k));
    return {r.begin(), r.begin() + k};
}

Index default_top_k(Index n)
{
    if (n < 2) throw ConfigError("default top-k needs n >= 2");
    return static_cast<Index>(std::floor(static_cast<double>(n) / std::log(static_cast<double>(n))));
}

ConditioningSet default_conditioning(const SurvivalDataset& dataset, const ScreenOptions& options)
{
    ScreenOptions marginal = options;
    marginal.statistics = StatisticSet::only(Statistic::wald);
    const auto result = screen(dataset, ConditioningSet{}, marginal);
    const Index top = result.ranking(Statistic::wald).front();
    const auto& rec = result.records[static_cast<std::size_t>(top)];
    if (!rec.ok()) throw FitError(FitError::Kind::numeric, "no marginal fit converged; cannot pick a conditioning variable");
    return ConditioningSet({top});
}

} // namespace coxcs
