#pragma once

#include "coxcs/baselines.hpp"
#include "coxcs/screening.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace coxcs {

// Emission formats. Covariate indices are written 1-based; missing values
// (failed fits, statistics not requested) are written as NA in CSV and null
// in JSON.

/// index,name,beta_hat,sigma_hat,wald,plik,fit_status
void write_screening_csv(std::ostream& out, const ScreeningResult& result, const std::vector<std::string>& names);

/// Full structure including the conditioning-only fit, per-record C-part
/// coefficients and rankings.
void write_screening_json(std::ostream& out, const ScreeningResult& result, const std::vector<std::string>& names);

/// method,index,name,statistic,rank,flagged
void write_baseline_csv(std::ostream& out, const BaselineResult& result, const std::vector<std::string>& names);
void write_baseline_json(std::ostream& out, const BaselineResult& result, const std::vector<std::string>& names);

/// One 1-based index per line under an "index,name" header.
void write_selection_csv(std::ostream& out, const std::vector<Index>& selected, const std::vector<std::string>& names);

/// CSV cell text; NA for non-finite values.
std::string csv_number(double v);

} // namespace coxcs
