#include "coxcs/simulation.hpp"

#include "coxcs/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace coxcs {

namespace {

constexpr double kPredictorClip = 700.0;
constexpr std::uint64_t kCalibrationStream = 0xCA11B4A7E0000000ULL;

double clip_predictor(double lp, Index& clipped)
{
    if (lp > kPredictorClip) {
        ++clipped;
        return kPredictorClip;
    }
    if (lp < -kPredictorClip) {
        ++clipped;
        return -kPredictorClip;
    }
    return lp;
}

/// Linear predictors for `rows` draws, generating only the active columns
/// (and the shared factors of their blocks).
Eigen::VectorXd sample_linear_predictors(const SimConfig& config, Index rows, Rng& rng)
{
    struct Active {
        std::size_t block;
        double coef;
    };
    const auto blocks = config.resolved_blocks();
    std::vector<Active> active;
    for (const auto& [j, b] : config.beta) {
        if (b == 0.0) continue;
        for (std::size_t k = 0; k < blocks.size(); ++k)
            if (j >= blocks[k].first && j < blocks[k].first + blocks[k].count) active.push_back({k, b});
    }
    std::vector<double> factor(blocks.size());
    Eigen::VectorXd lp(rows);
    for (Index i = 0; i < rows; ++i) {
        for (auto& f : factor) f = rng.normal();
        double acc = config.intercept;
        for (const auto& a : active) {
            const double rho = blocks[a.block].rho;
            acc += a.coef * (std::sqrt(1.0 - rho) * rng.normal() + std::sqrt(rho) * factor[a.block]);
        }
        lp[i] = acc;
    }
    return lp;
}

struct CalibrationDraws {
    Eigen::VectorXd event_times;
    Eigen::VectorXd censor_uniform;
};

CalibrationDraws calibration_draws(const SimConfig& config, Index replicates, std::uint64_t stream_id)
{
    Rng rng = Rng::stream(config.seed, stream_id);
    const Index rows = replicates * config.n;
    CalibrationDraws draws;
    const Eigen::VectorXd lp = sample_linear_predictors(config, rows, rng);
    draws.event_times.resize(rows);
    draws.censor_uniform.resize(rows);
    Index clipped = 0;
    for (Index i = 0; i < rows; ++i)
        draws.event_times[i] = -std::log(rng.uniform()) / std::exp(clip_predictor(lp[i], clipped));
    for (Index i = 0; i < rows; ++i) draws.censor_uniform[i] = rng.uniform();
    return draws;
}

double censoring_rate(const CalibrationDraws& draws, double upper)
{
    Index censored = 0;
    for (Index i = 0; i < draws.event_times.size(); ++i)
        censored += upper * draws.censor_uniform[i] < draws.event_times[i];
    return static_cast<double>(censored) / static_cast<double>(draws.event_times.size());
}

} // namespace

double normal_quantile(double u)
{
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double Rng::normal()
{
    return normal_quantile(uniform());
}

void SimConfig::check() const
{
    if (n < 2) throw ConfigError("simulation needs n >= 2");
    if (p < 1) throw ConfigError("simulation needs p >= 1");
    for (const auto& [j, b] : beta) {
        if (j < 0 || j >= p) throw ConfigError("beta index " + std::to_string(j + 1) + " outside [1, p]");
        if (!std::isfinite(b)) throw ConfigError("beta values must be finite");
    }
    if (!std::isfinite(intercept)) throw ConfigError("intercept must be finite");
    std::vector<char> covered(static_cast<std::size_t>(p), 0);
    for (const auto& blk : blocks) {
        if (!(blk.rho >= 0.0 && blk.rho < 1.0)) throw ConfigError("block correlation must lie in [0, 1)");
        if (blk.first < 0 || blk.count < 1 || blk.first + blk.count > p)
            throw ConfigError("covariate block outside [1, p]");
        for (Index j = blk.first; j < blk.first + blk.count; ++j) {
            if (covered[static_cast<std::size_t>(j)]) throw ConfigError("covariate blocks overlap");
            covered[static_cast<std::size_t>(j)] = 1;
        }
    }
    if (!(censor_target >= 0.0 && censor_target < 1.0)) throw ConfigError("censor_target must lie in [0, 1)");
    if (censor_upper && !(*censor_upper > 0.0)) throw ConfigError("censor_upper must be positive");
}

Eigen::VectorXd SimConfig::dense_beta() const
{
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    for (const auto& [j, v] : beta) b[j] = v;
    return b;
}

std::vector<Index> SimConfig::active_set() const
{
    std::vector<Index> out;
    for (const auto& [j, v] : beta)
        if (v != 0.0) out.push_back(j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<CovariateBlock> SimConfig::resolved_blocks() const
{
    std::vector<CovariateBlock> sorted = blocks;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<CovariateBlock> out;
    Index next = 0;
    for (const auto& blk : sorted) {
        if (blk.first > next) out.push_back({next, blk.first - next, 0.0});
        out.push_back(blk);
        next = blk.first + blk.count;
    }
    if (next < p) out.push_back({next, p - next, 0.0});
    return out;
}

Eigen::MatrixXd SimConfig::covariance() const
{
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
    for (const auto& blk : resolved_blocks())
        for (Index a = blk.first; a < blk.first + blk.count; ++a)
            for (Index b = blk.first; b < blk.first + blk.count; ++b)
                if (a != b) sigma(a, b) = blk.rho;
    return sigma;
}

SimConfig SimConfig::equicorrelated(Index n, Index p, double rho)
{
    SimConfig c;
    c.n = n;
    c.p = p;
    if (rho > 0.0) c.blocks = {{0, p, rho}};
    return c;
}

SimConfig SimConfig::example(int id, Index n, Index p, double censor_target, std::uint64_t seed)
{
    SimConfig c;
    c.n = n;
    c.p = p;
    c.censor_target = censor_target;
    c.seed = seed;
    switch (id) {
    case 1:
        // Variable 6 is marginally uncorrelated with the linear predictor:
        // 0.5 * (1 + 1 + 1 + 1 + 1) - 2.5 = 0.
        if (p < 6) throw ConfigError("example 1 needs p >= 6");
        for (Index j = 0; j < 5; ++j) c.beta.emplace_back(j, 1.0);
        c.beta.emplace_back(5, -2.5);
        c.blocks = {{0, p, 0.5}};
        break;
    case 2:
    case 3:
        if (p < 2) throw ConfigError("examples 2 and 3 need p >= 2");
        c.intercept = -1.0;
        c.beta = {{0, 10.0}, {p - 1, 1.0}};
        if (id == 3 && p > 2) c.blocks = {{0, p - 1, 0.9}};
        break;
    default: throw ConfigError("unknown example id " + std::to_string(id) + " (expected 1, 2 or 3)");
    }
    c.check();
    return c;
}

void write_sim_config(std::ostream& out, const SimConfig& config)
{
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    out << "n=" << config.n << '\n' << "p=" << config.p << '\n';
    out << "intercept=" << num(config.intercept) << '\n';
    out << "beta=";
    for (std::size_t k = 0; k < config.beta.size(); ++k)
        out << (k ? "," : "") << config.beta[k].first + 1 << ':' << num(config.beta[k].second);
    out << '\n' << "blocks=";
    for (std::size_t k = 0; k < config.blocks.size(); ++k) {
        const auto& b = config.blocks[k];
        out << (k ? "," : "") << b.first + 1 << '-' << b.first + b.count << ':' << num(b.rho);
    }
    out << '\n' << "censor_target=" << num(config.censor_target) << '\n';
    if (config.censor_upper) out << "censor_upper=" << num(*config.censor_upper) << '\n';
    out << "seed=" << config.seed << '\n';
}

SimConfig read_sim_config(std::istream& in)
{
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("sim config line " + std::to_string(lineno) + ": expected key=value");
        auto key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        auto value = line.substr(eq + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        kv[key] = value;
    }

    auto number = [](const std::string& key, const std::string& text) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || text.empty()) throw ConfigError("sim config: bad number for '" + key + "': " + text);
        return v;
    };
    auto split = [](const std::string& text) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) parts.push_back(item);
        return parts;
    };

    SimConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "n") c.n = static_cast<Index>(number(key, value));
        else if (key == "p") c.p = static_cast<Index>(number(key, value));
        else if (key == "intercept") c.intercept = number(key, value);
        else if (key == "censor_target") c.censor_target = number(key, value);
        else if (key == "censor_upper") c.censor_upper = number(key, value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "beta") {
            for (const auto& item : split(value)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw ConfigError("sim config: beta entries are index:value");
                c.beta.emplace_back(static_cast<Index>(number(key, item.substr(0, colon))) - 1,
                                    number(key, item.substr(colon + 1)));
            }
        } else if (key == "blocks") {
            for (const auto& item : split(value)) {
                const auto dash = item.find('-');
                const auto colon = item.find(':');
                if (dash == std::string::npos || colon == std::string::npos || colon < dash)
                    throw ConfigError("sim config: blocks entries are first-last:rho");
                const auto first = static_cast<Index>(number(key, item.substr(0, dash)));
                const auto last = static_cast<Index>(number(key, item.substr(dash + 1, colon - dash - 1)));
                c.blocks.push_back({first - 1, last - first + 1, number(key, item.substr(colon + 1))});
            }
        } else {
            throw ConfigError("sim config: unknown key '" + key + "'");
        }
    }
    c.check();
    return c;
}

Eigen::MatrixXd gen_covariates(const SimConfig& config, Rng& rng)
{
    const auto blocks = config.resolved_blocks();
    Eigen::MatrixXd z(config.n, config.p);
    for (Index i = 0; i < config.n; ++i) {
        for (const auto& blk : blocks) {
            const double shared = rng.normal();
            const double a = std::sqrt(1.0 - blk.rho);
            const double b = std::sqrt(blk.rho);
            for (Index j = blk.first; j < blk.first + blk.count; ++j) z(i, j) = a * rng.normal() + b * shared;
        }
    }
    return z;
}

SurvivalTimes gen_survival_times(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& beta, double intercept,
                                 Rng& rng)
{
    if (covariates.cols() != beta.size()) throw std::invalid_argument("beta length does not match covariates");
    SurvivalTimes out;
    const Eigen::VectorXd lp = covariates * beta;
    out.times.resize(covariates.rows());
    for (Index i = 0; i < covariates.rows(); ++i)
        out.times[i] = -std::log(rng.uniform()) / std::exp(clip_predictor(intercept + lp[i], out.clipped));
    return out;
}

double estimate_censoring(const SimConfig& config, double upper, Index replicates, std::uint64_t stream_id)
{
    return censoring_rate(calibration_draws(config, replicates, stream_id), upper);
}

CalibrationResult calibrate_censoring(const SimConfig& config, double target, Index replicates, double tolerance)
{
    config.check();
    if (!(target > 0.0 && target < 1.0)) throw ConfigError("censoring target must lie in (0, 1)");
    if (replicates < 1) throw ConfigError("calibration needs at least one replicate");
    const auto draws = calibration_draws(config, replicates, kCalibrationStream);

    double lo = std::log(1e-6);
    double hi = std::log(1e6);
    const double rate_lo = censoring_rate(draws, std::exp(lo));
    const double rate_hi = censoring_rate(draws, std::exp(hi));
    if (rate_lo < target - tolerance || rate_hi > target + tolerance)
        throw ConfigError("censoring target " + std::to_string(target) + " unreachable for c in [1e-6, 1e6]");

    CalibrationResult best{std::exp(hi), rate_hi};
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double rate = censoring_rate(draws, std::exp(mid));
        best = {std::exp(mid), rate};
        if (std::abs(rate - target) <= tolerance) break;
        // Larger c censors less.
        if (rate > target) lo = mid;
        else hi = mid;
    }
    return best;
}

SimReplicate gen_replicate(const SimConfig& config, std::uint64_t replicate_id)
{
    config.check();
    if (!config.censor_upper && config.censor_target > 0.0)
        throw ConfigError("gen_replicate needs censor_upper (run calibrate_censoring first)");

    Rng rng = Rng::stream(config.seed, replicate_id);
    const std::uint64_t key = rng.key();
    Eigen::MatrixXd z = gen_covariates(config, rng);
    auto event = gen_survival_times(z, config.dense_beta(), config.intercept, rng);

    Eigen::VectorXd time(config.n);
    Eigen::VectorXi status(config.n);
    for (Index i = 0; i < config.n; ++i) {
        const double t = event.times[i];
        const double c = config.censor_upper ? *config.censor_upper * rng.uniform()
                                             : std::numeric_limits<double>::infinity();
        time[i] = std::min(t, c);
        status[i] = t <= c ? 1 : 0;
    }
    const double censored = static_cast<double>(config.n - status.sum()) / static_cast<double>(config.n);
    return SimReplicate{SurvivalDataset(std::move(time), std::move(status), std::move(z)), config.active_set(),
                        censored, key, event.clipped};
}

} // namespace coxcs
