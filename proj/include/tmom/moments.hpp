#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "tmom/signal.hpp"

namespace tmom {

/// Raw temporal moments m_0 .. m_{K-1} of one realization. m_k is the period
/// integral of t^k |y(t)|^2 and carries units of second^k.
struct raw_moments {
  std::vector<double> values;

  std::size_t order() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
};

/// Received power, mean delay and rms delay spread.
struct standardized_moments {
  double p0 = 0.0;
  double tau_bar_s = 0.0;
  double tau_rms_s = 0.0;
};

/// N_real x K collection of raw-moment rows. Entries must be finite; sign
/// constraints are enforced by the distribution families that need them.
class moment_matrix {
 public:
  explicit moment_matrix(Eigen::MatrixXd values);
  static moment_matrix from_rows(const std::vector<raw_moments>& rows);

  std::size_t n_rows() const { return std::size_t(values_.rows()); }
  std::size_t dims() const { return std::size_t(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::VectorXd row_vec(std::size_t i) const {
    return values_.row(Eigen::Index(i)).transpose();
  }
  raw_moments row_moments(std::size_t i) const;

 private:
  Eigen::MatrixXd values_;  // rows = realizations, cols = moment orders
};

/// Trapezoidal quadrature of t^k |y(t)|^2 over one period, with the periodic
/// endpoint closed via y(period) = y(0). Throws degenerate_signal_error when
/// the signal is identically zero.
raw_moments compute_raw_moments(const time_signal& sig, std::size_t n_moments);

/// Eq-style transform (P0, tau_bar, tau_rms) from the first three raw moments.
/// A variance term within the negative numerical slack is clamped to zero;
/// beyond the slack it raises inconsistency_error.
standardized_moments standardize(const raw_moments& m);

std::vector<standardized_moments> standardize_rows(const moment_matrix& m);

/// Full pipeline over a dataset of responses; row i corresponds to input i.
moment_matrix batch_moments(std::span<const frequency_response> dataset,
                            std::size_t n_moments = 3,
                            std::size_t oversampling = 8);

}  // namespace tmom
