#include "medboot/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "medboot/errors.hpp"

namespace medboot {

namespace {

void check_column(const std::vector<double>& col, std::int64_t n,
                  const std::string& name) {
  if (static_cast<std::int64_t>(col.size()) != n) {
    throw_error(ErrorKind::input_error,
                "column '" + name + "' has " + std::to_string(col.size()) +
                    " rows, expected " + std::to_string(n));
  }
  for (double v : col) {
    if (!std::isfinite(v)) {
      throw_error(ErrorKind::input_error,
                  "column '" + name + "' contains a non-finite value");
    }
  }
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column) {
  double value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty() ||
      !std::isfinite(value)) {
    throw_error(ErrorKind::non_numeric_cell,
                "row " + std::to_string(row) + ", column '" + column +
                    "': cannot parse '" + cell + "' as a number");
  }
  return value;
}

}  // namespace

void Dataset::validate() const {
  if (n <= 0) throw_error(ErrorKind::input_error, "dataset has no rows");
  if (mediators.empty())
    throw_error(ErrorKind::input_error, "dataset needs at least one mediator");
  if (covariates.empty())
    throw_error(ErrorKind::input_error, "intercept covariate slot is missing");

  check_column(exposure, n, exposure_name);
  check_column(outcome, n, outcome_name);
  for (std::size_t k = 0; k < mediators.size(); ++k) {
    check_column(mediators[k], n,
                 k < mediator_names.size() ? mediator_names[k] : "M");
  }
  for (std::size_t k = 0; k < covariates.size(); ++k) {
    check_column(covariates[k], n,
                 k < covariate_names.size() ? covariate_names[k] : "X");
  }

  if (static_cast<std::size_t>(n) < max_params() + 1) {
    throw_error(ErrorKind::input_error,
                "need at least " + std::to_string(max_params() + 1) +
                    " rows for " + std::to_string(max_params()) +
                    " regression parameters, got " + std::to_string(n));
  }
}

Dataset make_dataset(std::vector<double> exposure,
                     std::vector<std::vector<double>> mediators,
                     std::vector<double> outcome,
                     std::vector<std::vector<double>> extra_covariates,
                     std::vector<std::string> mediator_names,
                     std::vector<std::string> covariate_names) {
  Dataset d;
  d.n = static_cast<std::int64_t>(exposure.size());
  d.exposure = std::move(exposure);
  d.mediators = std::move(mediators);
  d.outcome = std::move(outcome);

  d.covariates.reserve(extra_covariates.size() + 1);
  d.covariates.emplace_back(d.n, 1.0);  // intercept
  for (auto& c : extra_covariates) d.covariates.push_back(std::move(c));

  d.mediator_names = std::move(mediator_names);
  while (d.mediator_names.size() < d.mediators.size()) {
    d.mediator_names.push_back("M" + std::to_string(d.mediator_names.size() + 1));
  }
  d.covariate_names.push_back("(intercept)");
  for (std::size_t k = 0; k + 1 < d.covariates.size(); ++k) {
    d.covariate_names.push_back(k < covariate_names.size()
                                    ? covariate_names[k]
                                    : "X" + std::to_string(k + 1));
  }

  d.validate();
  return d;
}

Dataset parse_dataset_csv(const std::string& path, const ColumnRoleMap& roles) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::input_error, "cannot open '" + path + "'");

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw_error(ErrorKind::empty_file, "'" + path + "' has no header row");

  // Role names must be distinct and all present in the header.
  std::vector<std::string> wanted{roles.exposure, roles.outcome};
  wanted.insert(wanted.end(), roles.mediators.begin(), roles.mediators.end());
  wanted.insert(wanted.end(), roles.covariates.begin(), roles.covariates.end());
  {
    std::set<std::string> uniq(wanted.begin(), wanted.end());
    if (uniq.size() != wanted.size()) {
      throw_error(ErrorKind::input_error, "role column names must be distinct");
    }
  }
  auto column_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw_error(ErrorKind::missing_column,
                  "column '" + name + "' not found in header of '" + path + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t exposure_col = column_index(roles.exposure);
  const std::size_t outcome_col = column_index(roles.outcome);
  std::vector<std::size_t> mediator_cols, covariate_cols;
  for (const auto& m : roles.mediators) mediator_cols.push_back(column_index(m));
  for (const auto& c : roles.covariates) covariate_cols.push_back(column_index(c));
  if (mediator_cols.empty()) {
    throw_error(ErrorKind::input_error, "at least one mediator column is required");
  }

  std::vector<double> exposure, outcome;
  std::vector<std::vector<double>> mediators(mediator_cols.size());
  std::vector<std::vector<double>> covariates(covariate_cols.size());

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw_error(ErrorKind::input_error,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    exposure.push_back(parse_cell(fields[exposure_col], row, roles.exposure));
    outcome.push_back(parse_cell(fields[outcome_col], row, roles.outcome));
    for (std::size_t k = 0; k < mediator_cols.size(); ++k) {
      mediators[k].push_back(
          parse_cell(fields[mediator_cols[k]], row, roles.mediators[k]));
    }
    for (std::size_t k = 0; k < covariate_cols.size(); ++k) {
      covariates[k].push_back(
          parse_cell(fields[covariate_cols[k]], row, roles.covariates[k]));
    }
  }
  if (row == 0) throw_error(ErrorKind::empty_file, "'" + path + "' has no data rows");

  Dataset d = make_dataset(std::move(exposure), std::move(mediators),
                           std::move(outcome), std::move(covariates),
                           roles.mediators, roles.covariates);
  d.exposure_name = roles.exposure;
  d.outcome_name = roles.outcome;
  return d;
}

}  // namespace medboot
