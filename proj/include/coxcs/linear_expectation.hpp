#pragma once

#include "coxcs/survival.hpp"

#include <Eigen/Core>

namespace coxcs {

/**
 * Empirical conditional linear expectation E*(zeta | xi): the best affine
 * predictor of zeta from xi, zeta_mean + A^T (xi - xi_mean), with A solving
 * Var(xi) A = Cov(xi, zeta). Moments use denominator n so the sample
 * identities (stability, total expectation) hold exactly.
 */
struct CLEModel {
    Eigen::VectorXd target_mean;
    Eigen::VectorXd predictor_mean;
    /// A, dim(xi) x dim(zeta).
    Eigen::MatrixXd coefficients;
    Eigen::MatrixXd predictor_covariance;
    /// Cov(xi, zeta), dim(xi) x dim(zeta).
    Eigen::MatrixXd cross_covariance;
    bool pseudo_inverse = false;
};

/// Relative singular-value cutoff for the pseudo-inverse fallback.
inline constexpr double kPseudoInverseTolerance = 1e-10;

/// Rows are samples. Singular Var(xi) falls back to a pseudo-inverse when
/// allowed, otherwise throws ValidationError.
CLEModel fit_cle(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictors, bool allow_pseudo_inverse = true);

Eigen::VectorXd cle_predict(const CLEModel& model, const Eigen::VectorXd& xi);

/// Predictions for every row of `predictors` (n x dim(zeta)).
Eigen::MatrixXd cle_predict_rows(const CLEModel& model, const Eigen::MatrixXd& predictors);

/// Empirical partial covariance Cov(z1, z2) - Cov(z1, xi) Var(xi)^-1 Cov(xi, z2).
/// With xi having zero columns this is the plain covariance.
double cond_linear_cov(const Eigen::VectorXd& zeta1, const Eigen::VectorXd& zeta2, const Eigen::MatrixXd& xi,
                       bool allow_pseudo_inverse = true);

/// Partial covariance of Z_j with the event indicator given Z_C; a sample
/// proxy for the conditional signal strength of covariate j.
double signal_strength(const SurvivalDataset& dataset, const ConditioningSet& conditioning, Index j);

} // namespace coxcs
