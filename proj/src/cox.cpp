#include "coxcs/cox.hpp"

#include "coxcs/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace coxcs {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kLoglikSlack = 1e-11;

template <bool WithDerivatives, class Design>
PartialLikelihoodTerms accumulate(const RiskSetView& risk, const Design& design, const Eigen::VectorXd& beta)
{
    const Index n = design.rows();
    const Index d = design.cols();
    if (beta.size() != d)
        throw std::invalid_argument("beta has length " + std::to_string(beta.size()) + ", expected " +
                                    std::to_string(d));

    const Eigen::VectorXd eta = d > 0 ? Eigen::VectorXd(design * beta) : Eigen::VectorXd::Zero(n);

    PartialLikelihoodTerms out;
    Eigen::VectorXd s1, gross;
    Eigen::MatrixXd s2;
    if constexpr (WithDerivatives) {
        out.score = Eigen::VectorXd::Zero(d);
        out.information = Eigen::MatrixXd::Zero(d, d);
        s1 = Eigen::VectorXd::Zero(d);
        s2 = Eigen::MatrixXd::Zero(d, d);
        gross = Eigen::VectorXd::Zero(d);
    }

    double shift = -std::numeric_limits<double>::infinity();
    double s0 = 0.0;
    Index upper = n;
    for (Index k = risk.size() - 1; k >= 0; --k) {
        const auto uk = static_cast<std::size_t>(k);
        const Index lo = risk.risk_start[uk];
        if (upper > lo) {
            const double local = eta.segment(lo, upper - lo).maxCoeff();
            if (local > shift) {
                if (s0 > 0.0) {
                    const double rescale = std::exp(shift - local);
                    s0 *= rescale;
                    if constexpr (WithDerivatives) {
                        s1 *= rescale;
                        s2 *= rescale;
                    }
                }
                shift = local;
            }
            for (Index r = lo; r < upper; ++r) {
                const double w = std::exp(eta[r] - shift);
                s0 += w;
                if constexpr (WithDerivatives) {
                    const auto z = design.row(r).transpose();
                    s1.noalias() += w * z;
                    s2.noalias() += w * z * z.transpose();
                }
            }
            upper = lo;
        }

        const double count = static_cast<double>(risk.event_counts[uk]);
        const double log_s0 = std::log(s0) + shift;
        if (!std::isfinite(log_s0))
            throw FitError(FitError::Kind::numeric,
                           "non-finite risk-set sum at event time " + std::to_string(risk.event_times[uk]));
        for (Index r = lo; r < lo + risk.event_counts[uk]; ++r) {
            out.loglik += eta[r];
            if constexpr (WithDerivatives) out.score += design.row(r).transpose();
        }
        out.loglik -= count * log_s0;
        if constexpr (WithDerivatives) {
            const Eigen::VectorXd mean = s1 / s0;
            out.score.noalias() -= count * mean;
            out.information.noalias() += count * (s2 / s0 - mean * mean.transpose());
            gross.noalias() += count * s2.diagonal() / s0;
            if (!out.information.allFinite() || !out.score.allFinite())
                throw FitError(FitError::Kind::numeric,
                               "non-finite score or information at event time " +
                                   std::to_string(risk.event_times[uk]));
        }
    }
    if (!std::isfinite(out.loglik))
        throw FitError(FitError::Kind::numeric, "non-finite log partial likelihood");
    if constexpr (WithDerivatives) {
        out.information = (0.5 * (out.information + out.information.transpose())).eval();
        out.second_moment_scale = d > 0 ? gross.maxCoeff() : 0.0;
    }
    return out;
}

/// Smallest eigenvalue relative to the problem scale; small means singular.
bool nearly_singular(const PartialLikelihoodTerms& terms)
{
    const Index d = terms.information.rows();
    if (d == 0) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(terms.information, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double scale = std::max(hi, terms.second_moment_scale);
    return !(lo > 0.0) || !(scale > 0.0) || lo * kConditionLimit < scale;
}

Eigen::VectorXd solve_information(const Eigen::MatrixXd& information, const Eigen::VectorXd& rhs)
{
    Eigen::LLT<Eigen::MatrixXd> llt(information);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    return ldlt.solve(rhs);
}

Index runaway_coordinate(const Eigen::VectorXd& beta)
{
    Index at = 0;
    beta.cwiseAbs().maxCoeff(&at);
    return at;
}

} // namespace

void FitControl::check() const
{
    if (max_iterations <= 0 || !(score_tolerance > 0.0) || step_halving_limit <= 0 || !(coefficient_bound > 0.0))
        throw ConfigError("FitControl fields must all be positive");
}

CoxProblem::CoxProblem(const SurvivalDataset& dataset, const RiskSetView& risk, std::span<const Index> columns)
    : external_risk_(&risk)
{
    const Index n = dataset.n();
    const auto d = static_cast<Index>(columns.size());
    design_.resize(n, d);
    for (Index c = 0; c < d; ++c) {
        const Index j = columns[static_cast<std::size_t>(c)];
        if (j < 0 || j >= dataset.p()) throw std::out_of_range("column index " + std::to_string(j) + " out of range");
        const auto col = dataset.column(j);
        const double mean = col.mean();
        for (Index r = 0; r < n; ++r) design_(r, c) = col[risk.sorted_index[static_cast<std::size_t>(r)]] - mean;
    }
}

CoxProblem::CoxProblem(const SurvivalDataset& dataset, std::span<const Index> columns)
    : owned_risk_(build_risk_sets(dataset))
{
    const CoxProblem shared(dataset, *owned_risk_, columns);
    design_ = shared.design_;
}

double CoxProblem::log_likelihood(const Eigen::VectorXd& beta) const
{
    return accumulate<false>(risk_sets(), design_, beta).loglik;
}

PartialLikelihoodTerms CoxProblem::evaluate(const Eigen::VectorXd& beta) const
{
    return accumulate<true>(risk_sets(), design_, beta);
}

double log_partial_likelihood(const SurvivalDataset& dataset, std::span<const Index> columns,
                              const Eigen::VectorXd& beta)
{
    return CoxProblem(dataset, columns).log_likelihood(beta);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> score_and_information(const SurvivalDataset& dataset,
                                                                  std::span<const Index> columns,
                                                                  const Eigen::VectorXd& beta)
{
    auto terms = CoxProblem(dataset, columns).evaluate(beta);
    return {std::move(terms.score), std::move(terms.information)};
}

CoxFit fit(const CoxProblem& problem, const FitControl& control, const std::optional<Eigen::VectorXd>& init)
{
    control.check();
    const Index d = problem.dimension();
    Eigen::VectorXd beta = init ? *init : Eigen::VectorXd::Zero(d);
    if (beta.size() != d) throw std::invalid_argument("initial value has the wrong dimension");

    PartialLikelihoodTerms terms = problem.evaluate(beta);
    CoxFit result;
    const double step_tolerance = std::sqrt(control.score_tolerance);

    for (int iter = 0;; ++iter) {
        result.score_norm = d > 0 ? terms.score.norm() : 0.0;
        if (d == 0) {
            result.converged = true;
            break;
        }
        if (nearly_singular(terms)) {
            if (iter == 0)
                throw FitError(FitError::Kind::singular, "nonidentifiable: information matrix is singular");
            const Index at = runaway_coordinate(beta);
            throw FitError(FitError::Kind::separation,
                           "separation: information degenerated as coordinate " + std::to_string(at) +
                               " drifted to " + std::to_string(beta[at]),
                           static_cast<int>(at));
        }
        Eigen::VectorXd step = solve_information(terms.information, terms.score);
        if (result.score_norm <= control.score_tolerance && step.lpNorm<Eigen::Infinity>() <= step_tolerance) {
            result.converged = true;
            break;
        }
        if (iter >= control.max_iterations) break;

        Eigen::VectorXd candidate = beta + step;
        std::optional<PartialLikelihoodTerms> next;
        // Accept rounding-level decreases so the final Newton steps are not rejected.
        const double floor = terms.loglik - kLoglikSlack * (1.0 + std::abs(terms.loglik));
        for (int halving = 0; halving <= control.step_halving_limit; ++halving) {
            try {
                auto trial = problem.evaluate(candidate);
                if (trial.loglik >= floor) {
                    next = std::move(trial);
                    break;
                }
            } catch (const FitError& e) {
                if (e.kind() != FitError::Kind::numeric) throw;
            }
            step *= 0.5;
            candidate = beta + step;
        }
        if (!next) {
            // No ascent possible: already at the numerical maximum.
            result.converged = result.score_norm <= control.score_tolerance;
            break;
        }
        beta = std::move(candidate);
        terms = std::move(*next);
        result.iterations = iter + 1;

        if (beta.lpNorm<Eigen::Infinity>() > control.coefficient_bound) {
            const Index at = runaway_coordinate(beta);
            throw FitError(FitError::Kind::separation,
                           "separation: coordinate " + std::to_string(at) + " exceeded coefficient bound (" +
                               std::to_string(beta[at]) + ")",
                           static_cast<int>(at));
        }
    }

    result.coefficients = std::move(beta);
    result.loglik = terms.loglik;
    result.information = std::move(terms.information);
    if (d > 0 && !nearly_singular(PartialLikelihoodTerms{0.0, {}, result.information, terms.second_moment_scale})) {
        Eigen::LLT<Eigen::MatrixXd> llt(result.information);
        result.variances = llt.solve(Eigen::MatrixXd::Identity(d, d)).diagonal();
    } else {
        result.variances = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

CoxFit fit(const SurvivalDataset& dataset, std::span<const Index> columns, const FitControl& control,
           const std::optional<Eigen::VectorXd>& init)
{
    return fit(CoxProblem(dataset, columns), control, init);
}

double variance_of_last_coordinate(const CoxFit& fit)
{
    const Index d = fit.information.rows();
    if (d == 0) throw std::invalid_argument("variance_of_last_coordinate: empty fit");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.information, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (!(lo > 0.0) || lo * kConditionLimit < eig.eigenvalues().maxCoeff())
        throw FitError(FitError::Kind::singular, "information matrix is not invertible");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[d - 1] = 1.0;
    const double v = solve_information(fit.information, e)[d - 1];
    if (!(v > 0.0) || !std::isfinite(v)) throw FitError(FitError::Kind::singular, "information matrix is not invertible");
    return v;
}

} // namespace coxcs
