#pragma once

#include "coxcs/rng.hpp"
#include "coxcs/survival.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace coxcs {

/// Columns [first, first + count) share an equicorrelation rho.
struct CovariateBlock {
    Index first = 0;
    Index count = 0;
    double rho = 0.0;
};

/**
 * Generative design: Z rows i.i.d. normal with block-equicorrelated
 * covariance, T | Z exponential with rate exp(intercept + beta'Z), and
 * C ~ U[0, censor_upper] independent of T.
 */
struct SimConfig {
    Index n = 100;
    Index p = 1000;
    /// Sparse true coefficients (0-based index, value).
    std::vector<std::pair<Index, double>> beta;
    double intercept = 0.0;
    /// Columns not covered by any block are independent standard normal.
    std::vector<CovariateBlock> blocks;
    double censor_target = 0.2;
    std::optional<double> censor_upper;
    std::uint64_t seed = 1;

    void check() const;
    Eigen::VectorXd dense_beta() const;
    /// Indices with nonzero coefficient, ascending.
    std::vector<Index> active_set() const;
    /// Blocks covering every column exactly once, ascending.
    std::vector<CovariateBlock> resolved_blocks() const;
    /// Population covariance of one covariate row.
    Eigen::MatrixXd covariance() const;

    static SimConfig equicorrelated(Index n, Index p, double rho);
    /// Built-in designs 1-3 (hidden-variable examples).
    static SimConfig example(int id, Index n, Index p, double censor_target, std::uint64_t seed);
};

void write_sim_config(std::ostream& out, const SimConfig& config);
SimConfig read_sim_config(std::istream& in);

struct SimReplicate {
    SurvivalDataset dataset;
    std::vector<Index> true_active;
    double realized_censoring = 0.0;
    std::uint64_t seed_used = 0;
    /// Linear predictors clipped to +-700 before exponentiation.
    Index clipped_predictors = 0;
};

Eigen::MatrixXd gen_covariates(const SimConfig& config, Rng& rng);

struct SurvivalTimes {
    Eigen::VectorXd times;
    Index clipped = 0;
};

SurvivalTimes gen_survival_times(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& beta, double intercept,
                                 Rng& rng);

struct CalibrationResult {
    double upper = 0.0;
    double achieved = 0.0;
};

/// Default Monte-Carlo size: replicates x n draws per evaluation.
inline constexpr Index kCalibrationReplicates = 200;

/**
 * Bisection on log c over [1e-6, 1e6] using common random numbers, so the
 * estimated censoring rate is monotone in c; stops once within `tolerance`
 * of the target. Deterministic given config.seed.
 */
CalibrationResult calibrate_censoring(const SimConfig& config, double target,
                                      Index replicates = kCalibrationReplicates, double tolerance = 0.01);

/// Monte-Carlo censoring rate for a given upper bound on a fresh stream.
double estimate_censoring(const SimConfig& config, double upper, Index replicates, std::uint64_t stream_id);

/// Deterministic in (config.seed, replicate_id); requires censor_upper
/// unless censor_target is 0 (then no censoring).
SimReplicate gen_replicate(const SimConfig& config, std::uint64_t replicate_id);

} // namespace coxcs
