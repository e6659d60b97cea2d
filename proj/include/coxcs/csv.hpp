#pragma once

#include "coxcs/survival.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coxcs {

/// Which header columns hold time, status and covariates. With no explicit
/// covariate list every remaining column is a covariate, in header order.
struct ColumnSchema {
    std::string time_column = "time";
    std::string status_column = "status";
    std::optional<std::vector<std::string>> covariate_columns;
};

SurvivalDataset read_csv(std::istream& in, const ColumnSchema& schema = {});
SurvivalDataset read_csv(const std::filesystem::path& path, const ColumnSchema& schema = {});

/// Writes "time,status,<names...>" with 17 significant digits so that
/// read_csv reproduces every double exactly.
void write_csv(std::ostream& out, const SurvivalDataset& dataset);
void write_csv(const std::filesystem::path& path, const SurvivalDataset& dataset);

/// Shortest round-trippable decimal text ("%.17g").
std::string format_double(double value);

} // namespace coxcs
