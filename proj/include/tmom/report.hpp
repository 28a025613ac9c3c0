#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "tmom/models.hpp"
#include "tmom/moments.hpp"

namespace tmom {

/// Quantile-quantile pairs for one variable against a fitted marginal.
/// Empirical quantiles are the order statistics; theoretical quantiles use
/// plotting positions (i + 0.5) / N. The reference line passes through the
/// Q-Q points closest to the first and third quartiles.
struct qq_data {
  std::vector<double> theoretical;
  std::vector<double> empirical;
  double line_slope = 1.0;
  double line_intercept = 0.0;
};

qq_data compute_qq(std::vector<double> samples, const scalar_marginal& marginal);

struct ecdf_point {
  double value = 0.0;
  double fraction = 0.0;
};

/// Right-continuous empirical CDF with duplicates collapsed; the final
/// fraction is exactly 1.
std::vector<ecdf_point> ecdf(std::vector<double> samples);

/// Model density of one variable pair on a rectangular grid covering the data
/// range plus a 10% margin. Contour levels are quantiles of the model density
/// evaluated at the data points.
struct pair_density_grid {
  int dim_x = 0;
  int dim_y = 0;
  std::vector<double> x_grid;
  std::vector<double> y_grid;
  std::vector<std::vector<double>> density;  // density[iy][ix]
  std::vector<double> contour_levels;
};

/// Gaussian kernel density estimate of one data column (Silverman bandwidth).
struct kde_curve {
  int dim = 0;
  std::vector<double> grid;
  std::vector<double> density;
};

struct density_report {
  std::vector<pair_density_grid> pairs;  // lexicographic (i, j), i < j
  std::vector<kde_curve> kde;
};

using joint_model = std::variant<mvln_params, mvn_params>;

density_report density_grid(const moment_matrix& data, const joint_model& model,
                            std::size_t resolution);

/// Analytic 2-D marginal density of the joint model for dimensions (i, j).
double pair_density(const joint_model& model, std::size_t i, std::size_t j,
                    double x, double y);

}  // namespace tmom
