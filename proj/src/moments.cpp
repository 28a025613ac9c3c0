#include "tmom/moments.hpp"

#include <cmath>
#include <string>

#include "tmom/errors.hpp"

namespace tmom {

namespace {

constexpr double kVarianceSlack = 1e-12;

}  // namespace

moment_matrix::moment_matrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw parameter_error("moment matrix must have at least one row and column");
  }
  if (!values_.allFinite()) {
    throw parameter_error("moment matrix contains non-finite entries");
  }
}

moment_matrix moment_matrix::from_rows(const std::vector<raw_moments>& rows) {
  if (rows.empty()) {
    throw parameter_error("moment matrix must have at least one row");
  }
  const std::size_t k = rows.front().order();
  Eigen::MatrixXd values(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].order() != k) {
      throw parameter_error("row " + std::to_string(i) +
                            " has inconsistent moment count");
    }
    for (std::size_t j = 0; j < k; ++j) {
      values(Eigen::Index(i), Eigen::Index(j)) = rows[i].values[j];
    }
  }
  return moment_matrix(std::move(values));
}

raw_moments moment_matrix::row_moments(std::size_t i) const {
  raw_moments out;
  out.values.resize(dims());
  for (std::size_t j = 0; j < dims(); ++j) {
    out.values[j] = values_(Eigen::Index(i), Eigen::Index(j));
  }
  return out;
}

raw_moments compute_raw_moments(const time_signal& sig, std::size_t n_moments) {
  if (n_moments < 1) {
    throw parameter_error("moment count must be >= 1");
  }
  if (sig.values.empty() || !(sig.period_s > 0.0)) {
    throw parameter_error("invalid time signal");
  }

  const std::size_t len = sig.size();
  const double period = sig.period_s;
  const double h = period / double(len);

  std::vector<double> sums(n_moments, 0.0);
  bool any_nonzero = false;
  for (std::size_t i = 0; i < len; ++i) {
    const double power = std::norm(sig.values[i]);
    any_nonzero = any_nonzero || power > 0.0;
    const double t = h * double(i);
    double weight = power;  // t^k * power, built incrementally
    for (std::size_t k = 0; k < n_moments; ++k) {
      sums[k] += weight;
      weight *= t;
    }
  }
  if (!any_nonzero) {
    throw degenerate_signal_error("signal is identically zero");
  }

  // Close the trapezoid at t = period using periodicity. The left sum already
  // holds the t = 0 node, so the correction is (f(period) - f(0)) / 2.
  const double power0 = std::norm(sig.values[0]);
  raw_moments out;
  out.values.resize(n_moments);
  double period_pow = 1.0;
  for (std::size_t k = 0; k < n_moments; ++k) {
    const double f_end = period_pow * power0;
    const double f_begin = (k == 0) ? power0 : 0.0;
    out.values[k] = h * (sums[k] + 0.5 * (f_end - f_begin));
    period_pow *= period;
  }
  return out;
}

standardized_moments standardize(const raw_moments& m) {
  if (m.order() < 3) {
    throw parameter_error("standardized moments need at least m0, m1, m2");
  }
  const double m0 = m.values[0];
  const double m1 = m.values[1];
  const double m2 = m.values[2];
  if (!(m0 > 0.0)) {
    throw degenerate_signal_error("m0 must be positive, got " +
                                  std::to_string(m0));
  }
  const double discriminant = m0 * m2 - m1 * m1;
  if (discriminant < -kVarianceSlack * m0 * m2) {
    throw inconsistency_error(
        "m0*m2 - m1^2 is negative beyond numerical slack: " +
        std::to_string(discriminant));
  }
  standardized_moments out;
  out.p0 = m0;
  out.tau_bar_s = m1 / m0;
  out.tau_rms_s = std::sqrt(std::max(0.0, discriminant)) / m0;
  return out;
}

std::vector<standardized_moments> standardize_rows(const moment_matrix& m) {
  std::vector<standardized_moments> out;
  out.reserve(m.n_rows());
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    try {
      out.push_back(standardize(m.row_moments(i)));
    } catch (const compute_error& e) {
      throw compute_error("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

moment_matrix batch_moments(std::span<const frequency_response> dataset,
                            std::size_t n_moments, std::size_t oversampling) {
  if (dataset.empty()) {
    throw parameter_error("dataset is empty");
  }
  std::vector<raw_moments> rows;
  rows.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    try {
      rows.push_back(
          compute_raw_moments(inverse_transform(dataset[i], oversampling),
                              n_moments));
    } catch (const compute_error& e) {
      throw compute_error("realization " + std::to_string(i) + ": " + e.what());
    }
  }
  return moment_matrix::from_rows(rows);
}

}  // namespace tmom
