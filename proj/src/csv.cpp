#include "coxcs/csv.hpp"

#include "coxcs/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace coxcs {

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column)
{
    double value = 0.0;
    std::string_view text = cell;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(value))
        throw ValidationError("row " + std::to_string(row) + ", column '" + column +
                              "': malformed numeric cell '" + cell + "'");
    return value;
}

} // namespace

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

SurvivalDataset read_csv(std::istream& in, const ColumnSchema& schema)
{
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty CSV input: missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split(line);

    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t c = 0; c < header.size(); ++c) position.emplace(header[c], c);
    auto locate = [&](const std::string& name) {
        const auto it = position.find(name);
        if (it == position.end()) throw ValidationError("missing required column '" + name + "'");
        return it->second;
    };
    const auto time_col = locate(schema.time_column);
    const auto status_col = locate(schema.status_column);

    std::vector<std::size_t> cov_cols;
    std::vector<std::string> names;
    if (schema.covariate_columns) {
        for (const auto& name : *schema.covariate_columns) {
            cov_cols.push_back(locate(name));
            names.push_back(name);
        }
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == time_col || c == status_col) continue;
            cov_cols.push_back(c);
            names.push_back(header[c]);
        }
    }

    std::vector<double> times;
    std::vector<int> statuses;
    std::vector<std::vector<double>> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw ValidationError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(header.size()));
        times.push_back(parse_cell(cells[time_col], row, header[time_col]));
        const double s = parse_cell(cells[status_col], row, header[status_col]);
        if (s != 0.0 && s != 1.0)
            throw ValidationError("row " + std::to_string(row) + ": status must be 0 or 1, got '" +
                                  cells[status_col] + "'");
        statuses.push_back(static_cast<int>(s));
        std::vector<double> z;
        z.reserve(cov_cols.size());
        for (auto c : cov_cols) z.push_back(parse_cell(cells[c], row, header[c]));
        rows.push_back(std::move(z));
    }

    const auto n = static_cast<Index>(times.size());
    const auto p = static_cast<Index>(cov_cols.size());
    Eigen::MatrixXd z(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) z(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return SurvivalDataset(Eigen::Map<Eigen::VectorXd>(times.data(), n),
                           Eigen::Map<Eigen::VectorXi>(statuses.data(), n), std::move(z), std::move(names));
}

SurvivalDataset read_csv(const std::filesystem::path& path, const ColumnSchema& schema)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_csv(in, schema);
}

void write_csv(std::ostream& out, const SurvivalDataset& dataset)
{
    out << "time,status";
    for (const auto& name : dataset.covariate_names()) out << ',' << name;
    out << '\n';
    for (Index i = 0; i < dataset.n(); ++i) {
        out << format_double(dataset.time()[i]) << ',' << dataset.status()[i];
        for (Index j = 0; j < dataset.p(); ++j) out << ',' << format_double(dataset.covariates()(i, j));
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const SurvivalDataset& dataset)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(out, dataset);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace coxcs
