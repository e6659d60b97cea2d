#pragma once

#include "coxcs/screening.hpp"
#include "coxcs/survival.hpp"

#include <string_view>
#include <vector>

namespace coxcs {

/// Marginal screening competitors.
enum class BaselineMethod { psis_wald, psis_plik, cors, cris };

std::string_view to_string(BaselineMethod m);

struct BaselineResult {
    BaselineMethod method = BaselineMethod::psis_wald;
    /// One statistic per covariate (length p); NaN for failed marginal fits.
    std::vector<double> statistics;
    /// Covariate indices by descending statistic, ascending index on ties.
    std::vector<Index> ranking;
    /// Covariates whose statistic was degenerate (zero weighted variance for
    /// CORS, failed fit for PSIS).
    std::vector<Index> flagged;
};

enum class PsisFlavor { wald, plik };

/// Marginal Cox screening; delegates to screen() with an empty conditioning set.
BaselineResult psis(const SurvivalDataset& dataset, PsisFlavor flavor, const ScreenOptions& options = {});

/// Projects an already computed C = {} screen onto one statistic.
BaselineResult psis_from_screen(const ScreeningResult& marginal, PsisFlavor flavor);

/// Floor on the censoring survival estimate used for inverse weighting.
inline constexpr double kCensoringSurvivalFloor = 0.05;

/// Kaplan-Meier estimate of the censoring survival just before t, with
/// censorings as the events of interest. Events at t leave the risk set
/// before censorings tied at t do.
class CensoringSurvival
{
public:
    explicit CensoringSurvival(const SurvivalDataset& dataset);
    /// S_C(t-) = prod over censoring times s < t of (1 - c(s) / r(s)).
    double before(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> survival_after_;
};

/// delta_i / max(S_C(X_i-), floor); 0 for censored observations.
std::vector<double> ipw_weights(const SurvivalDataset& dataset);

enum class CorsTimeScale { observed, log };

/// |IPW-weighted Pearson correlation between follow-up time and Z_j|.
BaselineResult cors(const SurvivalDataset& dataset, CorsTimeScale scale = CorsTimeScale::observed);

/**
 * IPW concordance screening:
 *
 *      stat_j = | sum_{i,k} w_i 1[X_i < X_k] sgn(Z_kj - Z_ij) | / sum_{i,k} w_i 1[X_i < X_k]
 *
 * over ordered pairs with delta_i = 1. Equals twice the weighted mean of
 * (1[Z_ij < Z_kj] - 1/2) when Z_j has no ties, lies in [0, 1], and depends on
 * Z_j only through its ranks.
 */
BaselineResult cris(const SurvivalDataset& dataset);

} // namespace coxcs
