#include "tmom/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tmom/errors.hpp"

namespace tmom {

namespace {

std::size_t quartile_index(std::size_t n, double prob) {
  // Index whose plotting position (i + 0.5) / n is closest to prob.
  const double pos = prob * double(n) - 0.5;
  const double rounded = std::round(std::max(0.0, pos));
  return std::min(n - 1, std::size_t(rounded));
}

double type7_quantile(const std::vector<double>& sorted, double prob) {
  const double h = (double(sorted.size()) - 1.0) * prob;
  const std::size_t lo = std::size_t(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

qq_data compute_qq(std::vector<double> samples, const scalar_marginal& marginal) {
  if (samples.size() < 10) {
    throw parameter_error("qq needs at least 10 samples");
  }
  std::sort(samples.begin(), samples.end());

  qq_data out;
  const std::size_t n = samples.size();
  out.theoretical.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.theoretical[i] = marginal.quantile((double(i) + 0.5) / double(n));
  }
  out.empirical = std::move(samples);

  const std::size_t i1 = quartile_index(n, 0.25);
  const std::size_t i3 = quartile_index(n, 0.75);
  const double dx = out.theoretical[i3] - out.theoretical[i1];
  if (dx != 0.0) {
    out.line_slope = (out.empirical[i3] - out.empirical[i1]) / dx;
    out.line_intercept = out.empirical[i1] - out.line_slope * out.theoretical[i1];
  } else {
    out.line_slope = 1.0;
    out.line_intercept = 0.0;
  }
  return out;
}

std::vector<ecdf_point> ecdf(std::vector<double> samples) {
  if (samples.empty()) {
    throw parameter_error("ecdf needs at least one sample");
  }
  std::sort(samples.begin(), samples.end());
  std::vector<ecdf_point> out;
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], double(i + 1) / double(n)});
  }
  return out;
}

namespace {

struct pair_gaussian {
  double mean_x, mean_y;
  double var_x, var_y, cov_xy;
  bool log_domain;  // true: density of (exp(u), exp(v)) with (u,v) Gaussian
};

pair_gaussian pair_parameters(const joint_model& model, std::size_t i,
                              std::size_t j) {
  pair_gaussian g{};
  if (std::holds_alternative<mvln_params>(model)) {
    const auto& p = std::get<mvln_params>(model);
    g = {p.mu()[Eigen::Index(i)], p.mu()[Eigen::Index(j)],
         p.sigma()(Eigen::Index(i), Eigen::Index(i)),
         p.sigma()(Eigen::Index(j), Eigen::Index(j)),
         p.sigma()(Eigen::Index(i), Eigen::Index(j)), true};
  } else {
    const auto& p = std::get<mvn_params>(model);
    g = {p.mean()[Eigen::Index(i)], p.mean()[Eigen::Index(j)],
         p.cov()(Eigen::Index(i), Eigen::Index(i)),
         p.cov()(Eigen::Index(j), Eigen::Index(j)),
         p.cov()(Eigen::Index(i), Eigen::Index(j)), false};
  }
  return g;
}

double bivariate_density(const pair_gaussian& g, double x, double y) {
  double u = x;
  double v = y;
  double jacobian = 1.0;
  if (g.log_domain) {
    if (!(x > 0.0) || !(y > 0.0)) return 0.0;
    u = std::log(x);
    v = std::log(y);
    jacobian = 1.0 / (x * y);
  }
  const double det = g.var_x * g.var_y - g.cov_xy * g.cov_xy;
  if (!(det > 0.0)) {
    throw parameter_error("pair covariance is singular");
  }
  const double dx = u - g.mean_x;
  const double dy = v - g.mean_y;
  const double quad =
      (g.var_y * dx * dx - 2.0 * g.cov_xy * dx * dy + g.var_x * dy * dy) / det;
  return jacobian * std::exp(-0.5 * quad) /
         (2.0 * std::numbers::pi * std::sqrt(det));
}

std::size_t model_dims(const joint_model& model) {
  return std::holds_alternative<mvln_params>(model)
             ? std::get<mvln_params>(model).dims()
             : std::get<mvn_params>(model).dims();
}

}  // namespace

double pair_density(const joint_model& model, std::size_t i, std::size_t j,
                    double x, double y) {
  return bivariate_density(pair_parameters(model, i, j), x, y);
}

density_report density_grid(const moment_matrix& data, const joint_model& model,
                            std::size_t resolution) {
  if (resolution < 16) {
    throw parameter_error("grid resolution must be >= 16");
  }
  const std::size_t k = data.dims();
  if (model_dims(model) != k) {
    throw parameter_error("model and data dimensions differ");
  }

  const auto axis = [&](std::size_t dim) {
    const double lo = data.values().col(Eigen::Index(dim)).minCoeff();
    const double hi = data.values().col(Eigen::Index(dim)).maxCoeff();
    const double margin = 0.10 * std::max(hi - lo, std::abs(hi) * 1e-12);
    std::vector<double> grid(resolution);
    const double start = lo - margin;
    const double step = (hi + margin - start) / double(resolution - 1);
    for (std::size_t t = 0; t < resolution; ++t) {
      grid[t] = start + step * double(t);
    }
    return grid;
  };

  density_report out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      pair_density_grid grid;
      grid.dim_x = int(i);
      grid.dim_y = int(j);
      grid.x_grid = axis(i);
      grid.y_grid = axis(j);
      const pair_gaussian g = pair_parameters(model, i, j);
      grid.density.resize(resolution);
      for (std::size_t iy = 0; iy < resolution; ++iy) {
        grid.density[iy].resize(resolution);
        for (std::size_t ix = 0; ix < resolution; ++ix) {
          grid.density[iy][ix] =
              bivariate_density(g, grid.x_grid[ix], grid.y_grid[iy]);
        }
      }
      std::vector<double> at_data(data.n_rows());
      for (std::size_t r = 0; r < data.n_rows(); ++r) {
        at_data[r] = bivariate_density(
            g, data.values()(Eigen::Index(r), Eigen::Index(i)),
            data.values()(Eigen::Index(r), Eigen::Index(j)));
      }
      std::sort(at_data.begin(), at_data.end());
      for (double level : {0.5, 0.75, 0.9, 0.95, 0.99}) {
        // Density quantile such that roughly (1 - level) of the data mass
        // lies inside the contour.
        grid.contour_levels.push_back(type7_quantile(at_data, 1.0 - level));
      }
      out.pairs.push_back(std::move(grid));
    }
  }

  for (std::size_t dim = 0; dim < k; ++dim) {
    kde_curve curve;
    curve.dim = int(dim);
    curve.grid = axis(dim);

    std::vector<double> col(data.n_rows());
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
      col[r] = data.values()(Eigen::Index(r), Eigen::Index(dim));
    }
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    const double n = double(col.size());
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / std::max(1.0, n - 1.0));
    const double iqr =
        type7_quantile(sorted, 0.75) - type7_quantile(sorted, 0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = std::max(std::abs(mean), 1.0) * 1e-9;
    const double bandwidth = 0.9 * spread * std::pow(n, -0.2);

    curve.density.resize(curve.grid.size(), 0.0);
    const double norm = 1.0 / (n * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t t = 0; t < curve.grid.size(); ++t) {
      double sum = 0.0;
      for (double v : col) {
        const double z = (curve.grid[t] - v) / bandwidth;
        sum += std::exp(-0.5 * z * z);
      }
      curve.density[t] = norm * sum;
    }
    out.kde.push_back(std::move(curve));
  }
  return out;
}

}  // namespace tmom
