#pragma once

#include "coxcs/survival.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <utility>

namespace coxcs {

/// Newton controls. Defaults are tuned for standardized covariates.
struct FitControl {
    int max_iterations = 50;
    double score_tolerance = 1e-8;
    int step_halving_limit = 20;
    double coefficient_bound = 50.0;

    void check() const;
};

struct CoxFit {
    Eigen::VectorXd coefficients;
    double loglik = 0.0;
    double score_norm = 0.0;
    Eigen::MatrixXd information;
    Eigen::VectorXd variances;
    int iterations = 0;
    bool converged = false;
};

struct PartialLikelihoodTerms {
    double loglik = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd information;
    /// max_k sum over events of the risk-set weighted second moment of column k
    /// about the sample mean; the reference scale for the singularity test.
    double second_moment_scale = 0.0;
};

/**
 * Breslow partial likelihood for a fixed column subset.
 *
 * Holds the selected columns in risk order, centered at their sample means
 * (the partial likelihood is invariant to column shifts). Evaluation is a
 * single backward pass over event times with the exponentials rescaled by
 * the running maximum of the linear predictor over the growing risk set.
 */
class CoxProblem
{
public:
    CoxProblem(const SurvivalDataset& dataset, const RiskSetView& risk, std::span<const Index> columns);
    CoxProblem(const SurvivalDataset& dataset, std::span<const Index> columns);

    Index dimension() const noexcept { return design_.cols(); }
    const RiskSetView& risk_sets() const noexcept { return owned_risk_ ? *owned_risk_ : *external_risk_; }

    double log_likelihood(const Eigen::VectorXd& beta) const;
    PartialLikelihoodTerms evaluate(const Eigen::VectorXd& beta) const;

private:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    std::optional<RiskSetView> owned_risk_;
    const RiskSetView* external_risk_ = nullptr;
    RowMatrix design_;
};

double log_partial_likelihood(const SurvivalDataset& dataset, std::span<const Index> columns,
                              const Eigen::VectorXd& beta);

std::pair<Eigen::VectorXd, Eigen::MatrixXd> score_and_information(const SurvivalDataset& dataset,
                                                                  std::span<const Index> columns,
                                                                  const Eigen::VectorXd& beta);

/**
 * Maximizes the partial likelihood by Newton-Raphson with step halving.
 *
 * Converged means the score norm is within control.score_tolerance and the
 * Newton step is below sqrt(score_tolerance) in every coordinate; the step
 * condition keeps monotone-likelihood runs (score vanishing while the
 * coefficient drifts) from passing as converged. Returns converged = false
 * when max_iterations is exhausted.
 *
 * Throws FitError(singular) when the information is singular at the start
 * point and FitError(separation) when a coefficient exceeds
 * coefficient_bound or the information degenerates along the path.
 */
CoxFit fit(const CoxProblem& problem, const FitControl& control = {},
           const std::optional<Eigen::VectorXd>& init = std::nullopt);

CoxFit fit(const SurvivalDataset& dataset, std::span<const Index> columns, const FitControl& control = {},
           const std::optional<Eigen::VectorXd>& init = std::nullopt);

/// [I^-1]_{d,d}; the variance estimate of the last fitted coefficient.
double variance_of_last_coordinate(const CoxFit& fit);

} // namespace coxcs
