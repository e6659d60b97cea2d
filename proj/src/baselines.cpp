#include "coxcs/baselines.hpp"

#include "coxcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coxcs {

namespace {

std::vector<Index> all_indices(Index p)
{
    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    return idx;
}

BaselineResult finish(BaselineMethod method, std::vector<double> stats, std::vector<Index> flagged)
{
    BaselineResult out;
    out.method = method;
    out.ranking = rank_descending(all_indices(static_cast<Index>(stats.size())), stats);
    out.statistics = std::move(stats);
    out.flagged = std::move(flagged);
    return out;
}

} // namespace

std::string_view to_string(BaselineMethod m)
{
    switch (m) {
    case BaselineMethod::psis_wald: return "PSIS-Wald";
    case BaselineMethod::psis_plik: return "PSIS-PLIK";
    case BaselineMethod::cors: return "CORS";
    case BaselineMethod::cris: return "CRIS";
    }
    return "?";
}

BaselineResult psis_from_screen(const ScreeningResult& marginal, PsisFlavor flavor)
{
    if (!marginal.conditioning.empty()) throw ConfigError("PSIS needs a screen with an empty conditioning set");
    const Statistic stat = flavor == PsisFlavor::wald ? Statistic::wald : Statistic::plik;
    BaselineResult out;
    out.method = flavor == PsisFlavor::wald ? BaselineMethod::psis_wald : BaselineMethod::psis_plik;
    out.statistics.reserve(marginal.records.size());
    for (const auto& rec : marginal.records) {
        out.statistics.push_back(marginal.value(rec, stat));
        if (!rec.ok()) out.flagged.push_back(rec.index);
    }
    out.ranking = marginal.ranking(stat);
    return out;
}

BaselineResult psis(const SurvivalDataset& dataset, PsisFlavor flavor, const ScreenOptions& options)
{
    ScreenOptions opts = options;
    opts.statistics = StatisticSet::only(flavor == PsisFlavor::wald ? Statistic::wald : Statistic::plik);
    return psis_from_screen(screen(dataset, ConditioningSet{}, opts), flavor);
}

CensoringSurvival::CensoringSurvival(const SurvivalDataset& dataset)
{
    const auto& order = dataset.sorted_index();
    const auto& t = dataset.time();
    const auto& d = dataset.status();
    const auto n = order.size();
    double s = 1.0;
    for (std::size_t k = 0; k < n;) {
        std::size_t m = k;
        Index censored = 0;
        while (m < n && t[order[m]] == t[order[k]]) {
            censored += 1 - d[order[m]];
            ++m;
        }
        if (censored > 0) {
            // Risk set for censorings at this time: all with X >= t except the tied events.
            Index at_risk = static_cast<Index>(n - k);
            for (std::size_t r = k; r < m; ++r) at_risk -= d[order[r]];
            s *= 1.0 - static_cast<double>(censored) / static_cast<double>(at_risk);
            times_.push_back(t[order[k]]);
            survival_after_.push_back(s);
        }
        k = m;
    }
}

double CensoringSurvival::before(double t) const
{
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 1.0;
    return survival_after_[static_cast<std::size_t>(it - times_.begin() - 1)];
}

std::vector<double> ipw_weights(const SurvivalDataset& dataset)
{
    if (dataset.event_count() == 0) throw ValidationError("no events: inverse censoring weights undefined");
    const CensoringSurvival km(dataset);
    std::vector<double> w(static_cast<std::size_t>(dataset.n()), 0.0);
    for (Index i = 0; i < dataset.n(); ++i)
        if (dataset.status()[i] == 1)
            w[static_cast<std::size_t>(i)] = 1.0 / std::max(km.before(dataset.time()[i]), kCensoringSurvivalFloor);
    return w;
}

BaselineResult cors(const SurvivalDataset& dataset, CorsTimeScale scale)
{
    const auto w = ipw_weights(dataset);
    const Index n = dataset.n();
    const Eigen::Map<const Eigen::VectorXd> weights(w.data(), n);
    const double total = weights.sum();

    Eigen::VectorXd x = dataset.time();
    if (scale == CorsTimeScale::log) {
        for (Index i = 0; i < n; ++i)
            x[i] = dataset.status()[i] == 1 ? std::log(std::max(x[i], 1e-300)) : 0.0;
    }
    const double mx = weights.dot(x) / total;
    const Eigen::VectorXd xc = x.array() - mx;
    const double vx = weights.dot(xc.cwiseProduct(xc)) / total;

    std::vector<double> stats(static_cast<std::size_t>(dataset.p()), 0.0);
    std::vector<Index> flagged;
    for (Index j = 0; j < dataset.p(); ++j) {
        const auto z = dataset.column(j);
        const double mz = weights.dot(z) / total;
        const Eigen::VectorXd zc = z.array() - mz;
        const double vz = weights.dot(zc.cwiseProduct(zc)) / total;
        if (!(vx > 0.0) || !(vz > 0.0)) {
            flagged.push_back(j);
            continue;
        }
        const double cov = weights.dot(xc.cwiseProduct(zc)) / total;
        stats[static_cast<std::size_t>(j)] = std::min(1.0, std::abs(cov) / std::sqrt(vx * vz));
    }
    return finish(BaselineMethod::cors, std::move(stats), std::move(flagged));
}

BaselineResult cris(const SurvivalDataset& dataset)
{
    const auto w = ipw_weights(dataset);
    const Index n = dataset.n();
    const auto& t = dataset.time();

    struct Pair {
        Index first;
        Index second;
        double weight;
    };
    std::vector<Pair> pairs;
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double wi = w[static_cast<std::size_t>(i)];
        if (wi == 0.0) continue;
        for (Index k = 0; k < n; ++k)
            if (t[i] < t[k]) {
                pairs.push_back({i, k, wi});
                total += wi;
            }
    }

    std::vector<double> stats(static_cast<std::size_t>(dataset.p()), 0.0);
    std::vector<Index> flagged;
    if (!(total > 0.0)) {
        flagged = all_indices(dataset.p());
        return finish(BaselineMethod::cris, std::move(stats), std::move(flagged));
    }
    for (Index j = 0; j < dataset.p(); ++j) {
        const auto z = dataset.column(j);
        double acc = 0.0;
        for (const auto& pr : pairs) {
            const double diff = z[pr.second] - z[pr.first];
            acc += pr.weight * static_cast<double>((diff > 0.0) - (diff < 0.0));
        }
        stats[static_cast<std::size_t>(j)] = std::abs(acc) / total;
    }
    return finish(BaselineMethod::cris, std::move(stats), std::move(flagged));
}

} // namespace coxcs
