#pragma once

#include "coxcs/cox.hpp"
#include "coxcs/survival.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace coxcs {

/// CS-MPLE |beta_j|, CS-Wald |beta_j| / sigma_j, CS-PLIK likelihood-ratio increment.
enum class Statistic { mple, wald, plik };

inline constexpr std::array<Statistic, 3> kAllStatistics{Statistic::mple, Statistic::wald, Statistic::plik};

std::string_view to_string(Statistic s);
Statistic parse_statistic(std::string_view text);

enum class FitStatus { converged, separation, singular, not_converged };

std::string_view to_string(FitStatus s);

struct StatisticSet {
    bool mple = true;
    bool wald = false;
    bool plik = false;

    bool contains(Statistic s) const;
    static StatisticSet all() { return {true, true, true}; }
    static StatisticSet only(Statistic s);
};

struct CovariateScreenRecord {
    Index index = 0;
    double beta_hat = 0.0;
    double sigma_hat = 0.0;
    double wald = 0.0;
    double plik = 0.0;
    FitStatus fit_status = FitStatus::converged;
    int iterations = 0;
    /// C-part of the marginal fit, in conditioning-index order.
    Eigen::VectorXd conditioning_coefficients;
    std::string message;

    bool ok() const noexcept { return fit_status == FitStatus::converged; }
};

struct ScreeningResult {
    ConditioningSet conditioning;
    CoxFit null_fit;
    StatisticSet statistics;
    /// One record per covariate outside the conditioning set, ascending index.
    std::vector<CovariateScreenRecord> records;
    /// Per statistic (indexed by Statistic): covariate indices, best first.
    /// Empty for statistics that were not requested.
    std::array<std::vector<Index>, 3> rankings;

    const std::vector<Index>& ranking(Statistic s) const;
    /// Statistic value of a record; NaN when its fit failed.
    double value(const CovariateScreenRecord& record, Statistic s) const;
};

struct ScreenOptions {
    StatisticSet statistics{};
    FitControl control{};
    int workers = 1;
};

/**
 * Conditional screening sweep.
 *
 * Fits the conditioning-only model once, then for every j outside C fits
 * columns (C, j) warm-started at (beta_C0, 0). Per-covariate fit failures are
 * recorded and ranked after all converged fits; failure of the
 * conditioning-only fit aborts with FitError.
 */
ScreeningResult screen(const SurvivalDataset& dataset, const ConditioningSet& conditioning,
                       const ScreenOptions& options = {});

/// Covariates whose statistic is >= gamma, ascending index. Monotone in gamma.
std::vector<Index> select_by_threshold(const ScreeningResult& result, Statistic statistic, double gamma);

/// First k entries of the statistic's ranking, 1 <= k <= p - q.
std::vector<Index> select_top_k(const ScreeningResult& result, Statistic statistic, Index k);

/// floor(n / log n), the customary screening budget.
Index default_top_k(Index n);

/// The single covariate with the largest marginal Wald statistic.
ConditioningSet default_conditioning(const SurvivalDataset& dataset, const ScreenOptions& options = {});

/// Sorts covariates by descending score; NaN scores (failures) go last,
/// ties and failures by ascending index.
std::vector<Index> rank_descending(const std::vector<Index>& indices, const std::vector<double>& scores);

} // namespace coxcs
