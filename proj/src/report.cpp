#include "coxcs/report.hpp"

#include "coxcs/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace coxcs {

namespace {

using nlohmann::json;

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json vector_json(const Eigen::VectorXd& v)
{
    json arr = json::array();
    for (Index k = 0; k < v.size(); ++k) arr.push_back(number(v[k]));
    return arr;
}

json one_based(const std::vector<Index>& idx)
{
    json arr = json::array();
    for (auto j : idx) arr.push_back(j + 1);
    return arr;
}

const std::string& name_of(const std::vector<std::string>& names, Index j)
{
    return names.at(static_cast<std::size_t>(j));
}

} // namespace

std::string csv_number(double v)
{
    return std::isfinite(v) ? format_double(v) : "NA";
}

void write_screening_csv(std::ostream& out, const ScreeningResult& result, const std::vector<std::string>& names)
{
    out << "index,name,beta_hat,sigma_hat,wald,plik,fit_status\n";
    for (const auto& r : result.records)
        out << r.index + 1 << ',' << name_of(names, r.index) << ',' << csv_number(r.beta_hat) << ','
            << csv_number(r.sigma_hat) << ',' << csv_number(r.wald) << ',' << csv_number(r.plik) << ','
            << to_string(r.fit_status) << '\n';
}

void write_screening_json(std::ostream& out, const ScreeningResult& result, const std::vector<std::string>& names)
{
    json doc;
    doc["conditioning"] = one_based(result.conditioning.indices());
    doc["null_fit"] = {
        {"coefficients", vector_json(result.null_fit.coefficients)},
        {"loglik", number(result.null_fit.loglik)},
        {"score_norm", number(result.null_fit.score_norm)},
        {"variances", vector_json(result.null_fit.variances)},
        {"iterations", result.null_fit.iterations},
        {"converged", result.null_fit.converged},
    };
    json stats = json::array();
    json rankings = json::object();
    for (auto s : kAllStatistics) {
        if (!result.statistics.contains(s)) continue;
        stats.push_back(std::string(to_string(s)));
        rankings[std::string(to_string(s))] = one_based(result.ranking(s));
    }
    doc["statistics"] = stats;
    json records = json::array();
    for (const auto& r : result.records) {
        json rec = {
            {"index", r.index + 1},
            {"name", name_of(names, r.index)},
            {"beta_hat", number(r.beta_hat)},
            {"sigma_hat", number(r.sigma_hat)},
            {"wald", number(r.wald)},
            {"plik", number(r.plik)},
            {"fit_status", std::string(to_string(r.fit_status))},
            {"iterations", r.iterations},
            {"conditioning_coefficients", vector_json(r.conditioning_coefficients)},
        };
        if (!r.message.empty()) rec["message"] = r.message;
        records.push_back(std::move(rec));
    }
    doc["records"] = std::move(records);
    doc["rankings"] = std::move(rankings);
    out << doc.dump(2) << '\n';
}

void write_baseline_csv(std::ostream& out, const BaselineResult& result, const std::vector<std::string>& names)
{
    std::vector<Index> rank(result.statistics.size());
    for (std::size_t k = 0; k < result.ranking.size(); ++k)
        rank[static_cast<std::size_t>(result.ranking[k])] = static_cast<Index>(k) + 1;
    std::vector<char> flagged(result.statistics.size(), 0);
    for (auto j : result.flagged) flagged[static_cast<std::size_t>(j)] = 1;

    out << "method,index,name,statistic,rank,flagged\n";
    for (std::size_t j = 0; j < result.statistics.size(); ++j)
        out << to_string(result.method) << ',' << j + 1 << ',' << name_of(names, static_cast<Index>(j)) << ','
            << csv_number(result.statistics[j]) << ',' << rank[j] << ',' << int(flagged[j]) << '\n';
}

void write_baseline_json(std::ostream& out, const BaselineResult& result, const std::vector<std::string>& names)
{
    json doc;
    doc["method"] = std::string(to_string(result.method));
    json records = json::array();
    for (std::size_t j = 0; j < result.statistics.size(); ++j)
        records.push_back({{"index", j + 1},
                           {"name", name_of(names, static_cast<Index>(j))},
                           {"statistic", number(result.statistics[j])}});
    doc["records"] = std::move(records);
    doc["ranking"] = one_based(result.ranking);
    doc["flagged"] = one_based(result.flagged);
    out << doc.dump(2) << '\n';
}

void write_selection_csv(std::ostream& out, const std::vector<Index>& selected, const std::vector<std::string>& names)
{
    out << "index,name\n";
    for (auto j : selected) out << j + 1 << ',' << name_of(names, j) << '\n';
}

} // namespace coxcs
