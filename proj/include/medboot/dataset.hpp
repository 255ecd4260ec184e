#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Column-oriented dataset with declared roles. Covariates always carry an
// explicit intercept column in slot 0 so projection formulas never have to
// special-case it; processed (residualized) datasets may transform that
// column away from constant one, but the slot is still there.

namespace medboot {

struct Dataset {
  std::int64_t n = 0;
  std::vector<double> exposure;                 // S
  std::vector<std::vector<double>> mediators;   // M_1..M_J, J >= 1
  std::vector<double> outcome;                  // Y
  std::vector<std::vector<double>> covariates;  // X; slot 0 is the intercept

  std::string exposure_name = "S";
  std::vector<std::string> mediator_names;
  std::string outcome_name = "Y";
  std::vector<std::string> covariate_names;  // parallel to covariates

  std::size_t j() const { return mediators.size(); }

  // Parameters of the largest model fitted on this dataset
  // (outcome model: J mediators + covariates + exposure).
  std::size_t max_params() const {
    return mediators.size() + covariates.size() + 1;
  }

  // Checks sizes, finiteness, and the row-count requirement
  // n >= parameters + 1 for every fitted model. Throws on violation.
  void validate() const;
};

// Assembles a dataset from raw columns, injecting the intercept as the first
// covariate. `extra_covariates` excludes the intercept.
Dataset make_dataset(std::vector<double> exposure,
                     std::vector<std::vector<double>> mediators,
                     std::vector<double> outcome,
                     std::vector<std::vector<double>> extra_covariates = {},
                     std::vector<std::string> mediator_names = {},
                     std::vector<std::string> covariate_names = {});

struct ColumnRoleMap {
  std::string exposure;
  std::vector<std::string> mediators;
  std::string outcome;
  std::vector<std::string> covariates;  // without intercept
};

// Loads a comma-separated file with a header row and extracts the role
// columns. All role cells must parse as finite numbers.
Dataset parse_dataset_csv(const std::string& path, const ColumnRoleMap& roles);

}  // namespace medboot
