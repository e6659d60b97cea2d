#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace coxcs {

using Index = Eigen::Index;

/// One right-censored subject: follow-up time X = min(T, C), event flag,
/// and time-constant covariates.
struct Observation {
    double time = 0.0;
    int status = 0;
    std::vector<double> covariates;
};

/**
 * Immutable right-censored survival data.
 *
 * Covariates are stored column-major (n x p) since every consumer sweeps
 * over columns. Covariate indices in the C++ API are 0-based; the CLI and the
 * emitted CSV/JSON use 1-based indices.
 *
 * Construction enforces: n >= 2, p >= 1, finite nonnegative times,
 * status in {0, 1}, finite covariates, and matching dimensions. A dataset
 * with zero events can be constructed; validate() rejects it.
 */
class SurvivalDataset
{
public:
    SurvivalDataset(Eigen::VectorXd time, Eigen::VectorXi status, Eigen::MatrixXd covariates,
                    std::vector<std::string> covariate_names = {});

    static SurvivalDataset from_observations(std::span<const Observation> observations,
                                             std::vector<std::string> covariate_names = {});

    Index n() const noexcept { return time_.size(); }
    Index p() const noexcept { return covariates_.cols(); }

    const Eigen::VectorXd& time() const noexcept { return time_; }
    const Eigen::VectorXi& status() const noexcept { return status_; }
    const Eigen::MatrixXd& covariates() const noexcept { return covariates_; }
    auto column(Index j) const { return covariates_.col(j); }
    const std::vector<std::string>& covariate_names() const noexcept { return names_; }

    /// Row positions ordered by ascending time; at equal times events come
    /// before censorings, then original row order.
    const std::vector<Index>& sorted_index() const noexcept { return sorted_; }

    Observation observation(Index i) const;

    Index event_count() const noexcept { return events_; }

    /// Copy with the covariate matrix replaced (same n, names kept when p matches).
    SurvivalDataset with_covariates(Eigen::MatrixXd covariates,
                                    std::vector<std::string> names = {}) const;

private:
    Eigen::VectorXd time_;
    Eigen::VectorXi status_;
    Eigen::MatrixXd covariates_;
    std::vector<std::string> names_;
    std::vector<Index> sorted_;
    Index events_ = 0;
};

/// The covariates known a priori to matter (0-based, stored ascending).
class ConditioningSet
{
public:
    ConditioningSet() = default;
    /// Throws ValidationError on duplicate or negative indices.
    explicit ConditioningSet(std::vector<Index> indices);

    const std::vector<Index>& indices() const noexcept { return indices_; }
    Index size() const noexcept { return static_cast<Index>(indices_.size()); }
    bool empty() const noexcept { return indices_.empty(); }
    bool contains(Index j) const;

    /// Checks indices < p and q < n.
    void check(const SurvivalDataset& dataset) const;

    friend bool operator==(const ConditioningSet&, const ConditioningSet&) = default;

private:
    std::vector<Index> indices_;
};

struct ValidationReport {
    Index events = 0;
    Index censored = 0;
    std::vector<Index> constant_columns;
    /// Number of distinct time values shared by two or more observations.
    Index tied_time_values = 0;
};

/// Summarises the dataset; throws ValidationError when there are no events.
ValidationReport validate(const SurvivalDataset& dataset);

/**
 * Risk sets at the distinct event times.
 *
 * The risk set at event_times[k] is {i : X_i >= event_times[k]}, which in
 * sorted order is the suffix sorted_index[risk_start[k] ..). Events tied at
 * event_times[k] occupy the first event_counts[k] positions of that suffix.
 */
struct RiskSetView {
    std::vector<double> event_times;
    std::vector<Index> event_counts;
    std::vector<Index> risk_start;
    std::vector<Index> sorted_index;

    Index size() const noexcept { return static_cast<Index>(event_times.size()); }
    Index risk_set_size(Index k) const
    {
        return static_cast<Index>(sorted_index.size()) - risk_start[static_cast<std::size_t>(k)];
    }
    std::span<const Index> members(Index k) const
    {
        return std::span<const Index>(sorted_index).subspan(
            static_cast<std::size_t>(risk_start[static_cast<std::size_t>(k)]));
    }
};

RiskSetView build_risk_sets(const SurvivalDataset& dataset);

struct ScalingInfo {
    Eigen::VectorXd means;
    Eigen::VectorXd scales;

    /// Maps standardized covariate values back to the original units.
    Eigen::MatrixXd restore(const Eigen::MatrixXd& standardized) const;
};

struct Standardized {
    SurvivalDataset dataset;
    ScalingInfo scaling;
};

/// Centers each column and scales it to unit sample variance (n - 1).
/// Throws ValidationError naming the first constant column.
Standardized standardize(const SurvivalDataset& dataset);

/// Default names z1..zp.
std::vector<std::string> default_covariate_names(Index p);

} // namespace coxcs
