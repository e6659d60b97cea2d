#include "coxcs/metrics.hpp"

#include "coxcs/csv.hpp"
#include "coxcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace coxcs {

namespace {

std::unordered_map<Index, Index> positions(std::span<const Index> ranking)
{
    std::unordered_map<Index, Index> pos;
    pos.reserve(ranking.size());
    for (std::size_t k = 0; k < ranking.size(); ++k) pos.emplace(ranking[k], static_cast<Index>(k));
    return pos;
}

} // namespace

Index mms(std::span<const Index> ranking, std::span<const Index> true_active, const ConditioningSet& conditioning,
          Index conditioning_penalty)
{
    const auto pos = positions(ranking);
    Index needed = 0;
    for (auto j : true_active) {
        if (conditioning.contains(j)) continue;
        const auto it = pos.find(j);
        if (it == pos.end())
            throw ValidationError("active variable " + std::to_string(j + 1) + " is absent from the ranking");
        needed = std::max(needed, it->second + 1);
    }
    return needed + conditioning_penalty;
}

double tpr(std::span<const Index> ranking, std::span<const Index> true_active, Index n_budget,
           const ConditioningSet& conditioning)
{
    if (n_budget < 1) throw ConfigError("TPR budget must be at least 1");
    if (true_active.empty()) return 1.0;
    const auto pos = positions(ranking);
    Index found = 0;
    for (auto j : true_active) {
        if (conditioning.contains(j)) {
            ++found;
            continue;
        }
        const auto it = pos.find(j);
        if (it != pos.end() && it->second < n_budget) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(true_active.size());
}

bool sure_screened(std::span<const Index> ranking, std::span<const Index> true_active, Index k,
                   const ConditioningSet& conditioning)
{
    const auto pos = positions(ranking);
    return std::all_of(true_active.begin(), true_active.end(), [&](Index j) {
        if (conditioning.contains(j)) return true;
        const auto it = pos.find(j);
        return it != pos.end() && it->second < k;
    });
}

double quantile(std::vector<double> values, double prob)
{
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BenchmarkSummary summarize(std::span<const ReplicateScore> scores)
{
    if (scores.empty()) throw std::invalid_argument("summarize: no scores");
    BenchmarkSummary s;
    s.method = scores.front().method;
    std::vector<double> m, t;
    Index sure = 0;
    for (const auto& sc : scores) {
        if (sc.method != s.method) throw std::invalid_argument("summarize: mixed methods in one group");
        m.push_back(static_cast<double>(sc.mms));
        t.push_back(sc.tpr);
        sure += sc.sure_screened;
    }
    s.median_mms = quantile(m, 0.5);
    s.iqr_mms = quantile(m, 0.75) - quantile(m, 0.25);
    s.median_tpr = quantile(t, 0.5);
    s.iqr_tpr = quantile(t, 0.75) - quantile(t, 0.25);
    s.replicates = static_cast<Index>(scores.size());
    s.sure_rate = static_cast<double>(sure) / static_cast<double>(scores.size());
    return s;
}

void write_summary_csv(std::ostream& out, std::span<const BenchmarkSummary> rows, const std::string& config_id)
{
    out << "method,config_id,median_mms,iqr_mms,median_tpr,iqr_tpr,sure_rate,replicates\n";
    for (const auto& r : rows)
        out << r.method << ',' << config_id << ',' << format_double(r.median_mms) << ',' << format_double(r.iqr_mms)
            << ',' << format_double(r.median_tpr) << ',' << format_double(r.iqr_tpr) << ','
            << format_double(r.sure_rate) << ',' << r.replicates << '\n';
}

void write_scores_csv(std::ostream& out, std::span<const ReplicateScore> scores)
{
    out << "method,replicate,mms,tpr,sure_screened\n";
    for (const auto& s : scores)
        out << s.method << ',' << s.replicate_id << ',' << s.mms << ',' << format_double(s.tpr) << ','
            << (s.sure_screened ? 1 : 0) << '\n';
}

double silverman_bandwidth(std::span<const double> values)
{
    const auto n = static_cast<double>(values.size());
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    std::vector<double> copy(values.begin(), values.end());
    const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(n, -0.2);
}

std::vector<double> density_grid(std::span<const DensityGroup> groups, Index points)
{
    if (points < 2) throw std::invalid_argument("density grid needs at least 2 points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& g : groups) {
        if (g.values.empty()) continue;
        const auto [mn, mx] = std::minmax_element(g.values.begin(), g.values.end());
        const double h = silverman_bandwidth(g.values);
        lo = std::min(lo, *mn - 4.0 * h);
        hi = std::max(hi, *mx + 4.0 * h);
    }
    if (!std::isfinite(lo)) throw std::invalid_argument("density grid needs at least one nonempty group");
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (Index k = 0; k < points; ++k)
        grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    return grid;
}

DensityTable export_density_data(std::span<const DensityGroup> groups, std::vector<double> grid)
{
    DensityTable table;
    table.grid = std::move(grid);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (const auto& g : groups) {
        if (g.values.size() < 2) throw std::invalid_argument("density group '" + g.name + "' needs >= 2 values");
        DensityCurve curve;
        curve.group = g.name;
        const auto [mn, mx] = std::minmax_element(g.values.begin(), g.values.end());
        if (*mn == *mx) {
            curve.point_mass = true;
            curve.location = *mn;
            table.curves.push_back(std::move(curve));
            continue;
        }
        const double h = silverman_bandwidth(g.values);
        curve.bandwidth = h;
        const double scale = norm / (static_cast<double>(g.values.size()) * h);
        curve.density.reserve(table.grid.size());
        for (double x : table.grid) {
            double acc = 0.0;
            for (double v : g.values) {
                const double u = (x - v) / h;
                acc += std::exp(-0.5 * u * u);
            }
            curve.density.push_back(acc * scale);
        }
        for (std::size_t k = 1; k < table.grid.size(); ++k)
            curve.integral += 0.5 * (curve.density[k] + curve.density[k - 1]) * (table.grid[k] - table.grid[k - 1]);
        table.curves.push_back(std::move(curve));
    }
    return table;
}

void write_density_csv(std::ostream& out, const DensityTable& table)
{
    out << "group,x,density\n";
    for (const auto& c : table.curves) {
        if (c.point_mass) {
            out << c.group << ',' << format_double(c.location) << ",point_mass\n";
            continue;
        }
        for (std::size_t k = 0; k < table.grid.size(); ++k)
            out << c.group << ',' << format_double(table.grid[k]) << ',' << format_double(c.density[k]) << '\n';
    }
}

} // namespace coxcs
