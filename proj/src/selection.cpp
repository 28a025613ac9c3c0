#include "tmom/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tmom/errors.hpp"

namespace tmom {

double aic(double log_lik, int n_params) {
  if (n_params < 1) {
    throw parameter_error("aic requires at least one parameter");
  }
  return -2.0 * log_lik + 2.0 * double(n_params);
}

double bic(double log_lik, int n_params, std::size_t n_obs) {
  if (n_params < 1) {
    throw parameter_error("bic requires at least one parameter");
  }
  if (n_obs < 1) {
    throw parameter_error("bic requires at least one observation");
  }
  return -2.0 * log_lik + double(n_params) * std::log(double(n_obs));
}

void assign_ranks(std::vector<comparison_row>& rows) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].applicable) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rows[a].aic_value != rows[b].aic_value) {
      return rows[a].aic_value < rows[b].aic_value;
    }
    if (rows[a].n_params != rows[b].n_params) {
      return rows[a].n_params < rows[b].n_params;
    }
    return std::string(family_name(rows[a].family)) <
           std::string(family_name(rows[b].family));
  });
  for (auto& row : rows) row.rank = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    rows[order[r]].rank = int(r + 1);
  }
}

comparison_table compare_models(const moment_matrix& data,
                                std::span<const model_family> families,
                                std::string dataset_label) {
  if (families.size() < 2) {
    throw parameter_error("comparison needs at least two families");
  }
  comparison_table table;
  table.dataset_label = std::move(dataset_label);
  table.n_obs = data.n_rows();

  for (model_family family : families) {
    comparison_row row;
    row.family = family;
    try {
      const fit_result fit = fit_model(data, family);
      row.log_lik = fit.log_lik;
      row.n_params = fit.n_params;
      row.aic_value = aic(fit.log_lik, fit.n_params);
      row.bic_value = bic(fit.log_lik, fit.n_params, fit.n_obs);
    } catch (const compute_error& e) {
      row.applicable = false;
      row.note = e.what();
    }
    table.rows.push_back(std::move(row));
  }

  if (std::none_of(table.rows.begin(), table.rows.end(),
                   [](const comparison_row& r) { return r.applicable; })) {
    throw compute_error("no requested family is applicable to this data");
  }
  assign_ranks(table.rows);
  return table;
}

std::string format_comparison(const comparison_table& table) {
  std::string out;
  char line[256];
  if (!table.dataset_label.empty()) {
    std::snprintf(line, sizeof line, "Data set: %s (N = %zu)\n",
                  table.dataset_label.c_str(), table.n_obs);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-18s %6s %16s %16s %16s %6s\n", "model",
                "k", "loglik", "AIC", "BIC", "rank");
  out += line;
  for (const auto& row : table.rows) {
    if (!row.applicable) {
      std::snprintf(line, sizeof line, "%-18s %6s %16s %16s %16s %6s\n",
                    family_name(row.family), "-", "n/a", "n/a", "n/a", "-");
      out += line;
      continue;
    }
    std::snprintf(line, sizeof line, "%-18s %6d %16.4f %16.4f %16.4f %6d%s\n",
                  family_name(row.family), row.n_params, row.log_lik,
                  row.aic_value, row.bic_value, row.rank,
                  row.rank == 1 ? "  <- best" : "");
    out += line;
  }
  return out;
}

}  // namespace tmom
