#pragma once

#include "coxcs/survival.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace coxcs {

struct ReplicateScore {
    std::string method;
    std::uint64_t replicate_id = 0;
    Index mms = 0;
    double tpr = 0.0;
    bool sure_screened = false;
};

struct BenchmarkSummary {
    std::string method;
    double median_mms = 0.0;
    double iqr_mms = 0.0;
    double median_tpr = 0.0;
    double iqr_tpr = 0.0;
    double sure_rate = 0.0;
    Index replicates = 0;
};

/**
 * Minimum model size: the smallest k such that every active variable outside
 * the conditioning set is among the first k ranked covariates, plus
 * `conditioning_penalty` (q for conditional methods, 0 for marginal ones).
 * Throws ValidationError when an active variable is missing from the ranking.
 */
Index mms(std::span<const Index> ranking, std::span<const Index> true_active, const ConditioningSet& conditioning,
          Index conditioning_penalty);

/// Fraction of active variables inside C plus the first n_budget ranked covariates.
double tpr(std::span<const Index> ranking, std::span<const Index> true_active, Index n_budget,
           const ConditioningSet& conditioning);

/// True when every active variable is inside C plus the first k ranked covariates.
bool sure_screened(std::span<const Index> ranking, std::span<const Index> true_active, Index k,
                   const ConditioningSet& conditioning);

/// Linear-interpolation (type 7) sample quantile; values need not be sorted.
double quantile(std::vector<double> values, double prob);

/// Median and IQR per metric over one method's replicates.
BenchmarkSummary summarize(std::span<const ReplicateScore> scores);

void write_summary_csv(std::ostream& out, std::span<const BenchmarkSummary> rows, const std::string& config_id);
void write_scores_csv(std::ostream& out, std::span<const ReplicateScore> scores);

struct DensityCurve {
    std::string group;
    /// Zero variance: no estimate, `location` holds the common value.
    bool point_mass = false;
    double location = 0.0;
    double bandwidth = 0.0;
    std::vector<double> density;
    /// Trapezoid integral over the grid.
    double integral = 0.0;
};

struct DensityTable {
    std::vector<double> grid;
    std::vector<DensityCurve> curves;
};

struct DensityGroup {
    std::string name;
    std::vector<double> values;
};

/// 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> values);

/// Evenly spaced grid covering every group's range padded by four bandwidths.
std::vector<double> density_grid(std::span<const DensityGroup> groups, Index points = 512);

/// Gaussian-kernel density estimates of each group on a shared grid.
DensityTable export_density_data(std::span<const DensityGroup> groups, std::vector<double> grid);

/// Tidy CSV: group,x,density (point-mass groups emit one row with density "point_mass").
void write_density_csv(std::ostream& out, const DensityTable& table);

} // namespace coxcs
