#include "coxcs/linear_expectation.hpp"

#include "coxcs/error.hpp"

#include <Eigen/SVD>

namespace coxcs {

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& m, const Eigen::VectorXd& mean)
{
    return m.rowwise() - mean.transpose();
}

/// Solves Var(xi) A = rhs; returns whether the pseudo-inverse was needed.
bool solve_moments(const Eigen::MatrixXd& var, const Eigen::MatrixXd& rhs, bool allow_pinv, Eigen::MatrixXd& out)
{
    if (var.rows() == 0) {
        out.resize(0, rhs.cols());
        return false;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(var, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const bool singular = !(sv.minCoeff() > kPseudoInverseTolerance * sv.maxCoeff());
    if (singular && !allow_pinv) throw ValidationError("predictor covariance is singular");
    svd.setThreshold(kPseudoInverseTolerance);
    out = svd.solve(rhs);
    return singular;
}

} // namespace

CLEModel fit_cle(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictors, bool allow_pseudo_inverse)
{
    const Index n = targets.rows();
    if (predictors.rows() != n) throw std::invalid_argument("targets and predictors differ in sample size");
    if (n <= predictors.cols()) throw ValidationError("sample size must exceed the predictor dimension");

    CLEModel m;
    const double inv_n = 1.0 / static_cast<double>(n);
    m.target_mean = targets.colwise().mean();
    m.predictor_mean = predictors.cols() > 0 ? Eigen::VectorXd(predictors.colwise().mean()) : Eigen::VectorXd();
    const Eigen::MatrixXd tc = centered(targets, m.target_mean);
    const Eigen::MatrixXd pc = centered(predictors, m.predictor_mean);
    m.predictor_covariance = inv_n * pc.transpose() * pc;
    m.cross_covariance = inv_n * pc.transpose() * tc;
    m.pseudo_inverse = solve_moments(m.predictor_covariance, m.cross_covariance, allow_pseudo_inverse, m.coefficients);
    return m;
}

Eigen::VectorXd cle_predict(const CLEModel& model, const Eigen::VectorXd& xi)
{
    if (xi.size() != model.predictor_mean.size())
        throw std::invalid_argument("predictor has dimension " + std::to_string(xi.size()) + ", model expects " +
                                    std::to_string(model.predictor_mean.size()));
    if (xi.size() == 0) return model.target_mean;
    return model.target_mean + model.coefficients.transpose() * (xi - model.predictor_mean);
}

Eigen::MatrixXd cle_predict_rows(const CLEModel& model, const Eigen::MatrixXd& predictors)
{
    if (predictors.cols() != model.predictor_mean.size()) throw std::invalid_argument("predictor dimension mismatch");
    Eigen::MatrixXd out = centered(predictors, model.predictor_mean) * model.coefficients;
    if (predictors.cols() == 0) out = Eigen::MatrixXd::Zero(predictors.rows(), model.target_mean.size());
    return out.rowwise() + model.target_mean.transpose();
}

double cond_linear_cov(const Eigen::VectorXd& zeta1, const Eigen::VectorXd& zeta2, const Eigen::MatrixXd& xi,
                       bool allow_pseudo_inverse)
{
    const Index n = zeta1.size();
    if (zeta2.size() != n || xi.rows() != n) throw std::invalid_argument("samples differ in length");
    if (n <= xi.cols()) throw ValidationError("sample size must exceed the predictor dimension");
    const double inv_n = 1.0 / static_cast<double>(n);
    const Eigen::VectorXd a = zeta1.array() - zeta1.mean();
    const Eigen::VectorXd b = zeta2.array() - zeta2.mean();
    double cov = inv_n * a.dot(b);
    if (xi.cols() == 0) return cov;

    const Eigen::VectorXd mean = xi.colwise().mean();
    const Eigen::MatrixXd xc = centered(xi, mean);
    const Eigen::MatrixXd var = inv_n * xc.transpose() * xc;
    const Eigen::VectorXd cross1 = inv_n * xc.transpose() * a;
    const Eigen::VectorXd cross2 = inv_n * xc.transpose() * b;
    Eigen::MatrixXd coef;
    solve_moments(var, cross2, allow_pseudo_inverse, coef);
    return cov - cross1.dot(coef.col(0));
}

double signal_strength(const SurvivalDataset& dataset, const ConditioningSet& conditioning, Index j)
{
    conditioning.check(dataset);
    if (j < 0 || j >= dataset.p()) throw std::out_of_range("covariate index out of range");
    if (conditioning.contains(j)) throw ValidationError("covariate " + std::to_string(j + 1) + " is in the conditioning set");
    Eigen::MatrixXd xi(dataset.n(), conditioning.size());
    for (Index c = 0; c < conditioning.size(); ++c)
        xi.col(c) = dataset.column(conditioning.indices()[static_cast<std::size_t>(c)]);
    const Eigen::VectorXd delta = dataset.status().cast<double>();
    return cond_linear_cov(dataset.column(j), delta, xi);
}

} // namespace coxcs
