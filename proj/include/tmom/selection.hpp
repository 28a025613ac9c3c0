#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tmom/inference.hpp"
#include "tmom/moments.hpp"

namespace tmom {

/// Akaike information criterion, -2 L + 2 kappa. Lower is better.
double aic(double log_lik, int n_params);

/// Bayesian information criterion, -2 L + kappa ln N.
double bic(double log_lik, int n_params, std::size_t n_obs);

struct comparison_row {
  model_family family = model_family::mvln;
  bool applicable = true;
  double log_lik = 0.0;
  double aic_value = 0.0;
  double bic_value = 0.0;
  int n_params = 0;
  int rank = 0;       // 1 = best; 0 for inapplicable rows
  std::string note;   // why a family was skipped
};

struct comparison_table {
  std::string dataset_label;
  std::size_t n_obs = 0;
  std::vector<comparison_row> rows;
};

/// Ranks applicable rows by ascending AIC; ties break on fewer parameters,
/// then lexicographic family name.
void assign_ranks(std::vector<comparison_row>& rows);

/// Fits every requested family by maximum likelihood and ranks by AIC.
/// Families whose support the data violates become inapplicable rows rather
/// than aborting the comparison.
comparison_table compare_models(const moment_matrix& data,
                                std::span<const model_family> families,
                                std::string dataset_label = "");

/// Plain-text table with the winner flagged.
std::string format_comparison(const comparison_table& table);

}  // namespace tmom
