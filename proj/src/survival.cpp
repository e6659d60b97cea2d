#include "coxcs/survival.hpp"

#include "coxcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coxcs {

namespace {

std::vector<Index> time_order(const Eigen::VectorXd& time, const Eigen::VectorXi& status)
{
    std::vector<Index> order(static_cast<std::size_t>(time.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (time[a] != time[b]) return time[a] < time[b];
        return status[a] > status[b];
    });
    return order;
}

bool is_constant(const Eigen::Ref<const Eigen::VectorXd>& v)
{
    return v.size() == 0 || v.maxCoeff() == v.minCoeff();
}

} // namespace

std::vector<std::string> default_covariate_names(Index p)
{
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) names.push_back("z" + std::to_string(j + 1));
    return names;
}

SurvivalDataset::SurvivalDataset(Eigen::VectorXd time, Eigen::VectorXi status,
                                 Eigen::MatrixXd covariates, std::vector<std::string> covariate_names)
    : time_(std::move(time))
    , status_(std::move(status))
    , covariates_(std::move(covariates))
    , names_(std::move(covariate_names))
{
    const Index n = time_.size();
    if (n < 2) throw ValidationError("dataset needs at least 2 observations, got " + std::to_string(n));
    if (status_.size() != n || covariates_.rows() != n)
        throw ValidationError("time, status and covariate rows disagree in length");
    if (covariates_.cols() < 1) throw ValidationError("dataset needs at least one covariate");
    if (names_.empty()) names_ = default_covariate_names(covariates_.cols());
    if (static_cast<Index>(names_.size()) != covariates_.cols())
        throw ValidationError("covariate_names has " + std::to_string(names_.size()) +
                              " entries for " + std::to_string(covariates_.cols()) + " columns");

    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(time_[i]) || time_[i] < 0.0)
            throw ValidationError("observation " + std::to_string(i + 1) +
                                  ": time must be finite and nonnegative");
        if (status_[i] != 0 && status_[i] != 1)
            throw ValidationError("observation " + std::to_string(i + 1) + ": status must be 0 or 1, got " +
                                  std::to_string(status_[i]));
    }
    for (Index j = 0; j < covariates_.cols(); ++j)
        for (Index i = 0; i < n; ++i)
            if (!std::isfinite(covariates_(i, j)))
                throw ValidationError("observation " + std::to_string(i + 1) + ", covariate '" +
                                      names_[static_cast<std::size_t>(j)] + "': non-finite value");

    events_ = status_.sum();
    sorted_ = time_order(time_, status_);
}

SurvivalDataset SurvivalDataset::from_observations(std::span<const Observation> observations,
                                                   std::vector<std::string> covariate_names)
{
    const auto n = static_cast<Index>(observations.size());
    const auto p = n > 0 ? static_cast<Index>(observations.front().covariates.size()) : Index{0};
    Eigen::VectorXd time(n);
    Eigen::VectorXi status(n);
    Eigen::MatrixXd z(n, p);
    for (Index i = 0; i < n; ++i) {
        const auto& obs = observations[static_cast<std::size_t>(i)];
        if (static_cast<Index>(obs.covariates.size()) != p)
            throw ValidationError("observation " + std::to_string(i + 1) + " has " +
                                  std::to_string(obs.covariates.size()) + " covariates, expected " +
                                  std::to_string(p));
        time[i] = obs.time;
        status[i] = obs.status;
        for (Index j = 0; j < p; ++j) z(i, j) = obs.covariates[static_cast<std::size_t>(j)];
    }
    return SurvivalDataset(std::move(time), std::move(status), std::move(z), std::move(covariate_names));
}

Observation SurvivalDataset::observation(Index i) const
{
    Observation obs;
    obs.time = time_[i];
    obs.status = status_[i];
    obs.covariates.resize(static_cast<std::size_t>(p()));
    for (Index j = 0; j < p(); ++j) obs.covariates[static_cast<std::size_t>(j)] = covariates_(i, j);
    return obs;
}

SurvivalDataset SurvivalDataset::with_covariates(Eigen::MatrixXd covariates,
                                                 std::vector<std::string> names) const
{
    if (names.empty() && covariates.cols() == p()) names = names_;
    return SurvivalDataset(time_, status_, std::move(covariates), std::move(names));
}

ConditioningSet::ConditioningSet(std::vector<Index> indices) : indices_(std::move(indices))
{
    std::sort(indices_.begin(), indices_.end());
    if (!indices_.empty() && indices_.front() < 0) throw ValidationError("conditioning index must be nonnegative");
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
        throw ValidationError("conditioning indices must be distinct");
}

bool ConditioningSet::contains(Index j) const
{
    return std::binary_search(indices_.begin(), indices_.end(), j);
}

void ConditioningSet::check(const SurvivalDataset& dataset) const
{
    for (auto j : indices_)
        if (j >= dataset.p())
            throw ValidationError("conditioning index " + std::to_string(j + 1) + " exceeds p = " +
                                  std::to_string(dataset.p()));
    if (size() >= dataset.n())
        throw ValidationError("conditioning set size " + std::to_string(size()) + " must be below n = " +
                              std::to_string(dataset.n()));
}

ValidationReport validate(const SurvivalDataset& dataset)
{
    ValidationReport report;
    report.events = dataset.event_count();
    report.censored = dataset.n() - report.events;
    if (report.events == 0) throw ValidationError("no events: every observation is censored");

    for (Index j = 0; j < dataset.p(); ++j)
        if (is_constant(dataset.column(j))) report.constant_columns.push_back(j);

    const auto& order = dataset.sorted_index();
    const auto& t = dataset.time();
    for (std::size_t k = 0; k < order.size();) {
        std::size_t m = k + 1;
        while (m < order.size() && t[order[m]] == t[order[k]]) ++m;
        if (m - k > 1) ++report.tied_time_values;
        k = m;
    }
    return report;
}

RiskSetView build_risk_sets(const SurvivalDataset& dataset)
{
    RiskSetView view;
    view.sorted_index = dataset.sorted_index();
    const auto& t = dataset.time();
    const auto& d = dataset.status();
    const auto& order = view.sorted_index;

    for (std::size_t k = 0; k < order.size();) {
        // First position carrying this time value; events at this time follow immediately.
        const double tk = t[order[k]];
        std::size_t m = k;
        Index events = 0;
        while (m < order.size() && t[order[m]] == tk) {
            events += d[order[m]];
            ++m;
        }
        if (events > 0) {
            view.event_times.push_back(tk);
            view.event_counts.push_back(events);
            view.risk_start.push_back(static_cast<Index>(k));
        }
        k = m;
    }
    return view;
}

Eigen::MatrixXd ScalingInfo::restore(const Eigen::MatrixXd& standardized) const
{
    Eigen::MatrixXd out = standardized;
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = out.col(j).array() * scales[j] + means[j];
    return out;
}

Standardized standardize(const SurvivalDataset& dataset)
{
    const Index n = dataset.n();
    const Index p = dataset.p();
    ScalingInfo info{Eigen::VectorXd(p), Eigen::VectorXd(p)};
    Eigen::MatrixXd z = dataset.covariates();
    for (Index j = 0; j < p; ++j) {
        if (is_constant(z.col(j)))
            throw ValidationError("cannot standardize constant column '" +
                                  dataset.covariate_names()[static_cast<std::size_t>(j)] + "'");
        const double mean = z.col(j).mean();
        const double sd = std::sqrt((z.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
        info.means[j] = mean;
        info.scales[j] = sd;
        z.col(j) = (z.col(j).array() - mean) / sd;
    }
    return {dataset.with_covariates(std::move(z)), std::move(info)};
}

} // namespace coxcs
