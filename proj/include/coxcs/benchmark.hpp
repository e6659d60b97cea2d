#pragma once

#include "coxcs/metrics.hpp"
#include "coxcs/screening.hpp"
#include "coxcs/simulation.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace coxcs {

enum class Method { cs_mple, cs_wald, cs_plik, psis_wald, psis_plik, cors, cris };

inline constexpr Method kAllMethods[] = {Method::cs_mple,   Method::cs_wald, Method::cs_plik, Method::psis_wald,
                                         Method::psis_plik, Method::cors,    Method::cris};

std::string_view to_string(Method m);
/// Case-insensitive; accepts the display names (CS-MPLE, PSIS-PLIK, ...).
Method parse_method(std::string_view text);
bool is_conditional(Method m);

struct ConditioningSpec {
    enum class Mode { list, automatic, none };
    Mode mode = Mode::none;
    /// 0-based.
    std::vector<Index> indices;

    /// "none", "auto", or a 1-based comma list such as "1,3".
    static ConditioningSpec parse(std::string_view text);
    ConditioningSet resolve(const SurvivalDataset& dataset, const ScreenOptions& options) const;
    std::string describe() const;
};

struct BenchmarkPlan {
    SimConfig sim;
    Index replicates = 100;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    ConditioningSpec conditioning{ConditioningSpec::Mode::list, {0}};
    /// Selection budget for TPR; 0 means n.
    Index tpr_budget = 0;
    /// Retention size for the sure-screening flag; 0 means floor(n / log n).
    Index sure_k = 0;
    FitControl control{};
    int workers = 1;
    /// Calibrate the censoring bound from sim.censor_target when sim.censor_upper is unset.
    bool calibrate = true;
};

struct BenchmarkOutcome {
    /// Method-major, then replicate order.
    std::vector<ReplicateScore> scores;
    std::vector<BenchmarkSummary> summaries;
    double censor_upper = 0.0;
    double calibrated_rate = 0.0;
    double mean_realized_censoring = 0.0;
    Index failures = 0;
    Index clipped_predictors = 0;
};

/// Rankings of every requested method on one replicate. Failed methods
/// yield an empty ranking.
struct ReplicateRankings {
    ConditioningSet conditioning;
    std::vector<std::vector<Index>> rankings;
    std::vector<std::string> errors;
};

ReplicateRankings rank_replicate(const SurvivalDataset& dataset, const std::vector<Method>& methods,
                                 const ConditioningSpec& conditioning, const FitControl& control);

/**
 * Runs every method on replicates 0..replicates-1 of the design. Replicates
 * are distributed over workers; each replicate is a pure function of
 * (seed, id), so the outcome does not depend on the worker count. A method
 * failing on a replicate is scored as a worst case (MMS = p, only
 * conditioning variables found, not sure-screened) and counted.
 */
BenchmarkOutcome run_benchmark(const BenchmarkPlan& plan);

} // namespace coxcs
