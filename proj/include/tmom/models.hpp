#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "tmom/moments.hpp"

namespace tmom {

/// Relative eigenvalue threshold below which a covariance is rejected as
/// numerically singular.
inline constexpr double kCovarianceEigenTol = 1e-12;

/// Multivariate log-normal: m = exp(x) with x ~ N(mu, sigma). Parameters are
/// the latent Gaussian's mean vector and covariance matrix (natural logs).
class mvln_params {
 public:
  mvln_params(Eigen::VectorXd mu, Eigen::MatrixXd sigma);

  std::size_t dims() const { return std::size_t(mu_.size()); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  /// Lower-triangular L with sigma = L L^T.
  const Eigen::MatrixXd& chol_lower() const { return chol_; }
  double log_det_sigma() const { return log_det_; }

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  double log_det_ = 0.0;
};

/// Multivariate Gaussian on the raw (linear-unit) moments.
class mvn_params {
 public:
  mvn_params(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  std::size_t dims() const { return std::size_t(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const Eigen::MatrixXd& chol_lower() const { return chol_; }
  double log_det_cov() const { return log_det_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  double log_det_ = 0.0;
};

enum class marginal_family { log_normal, gaussian, gamma };

const char* to_string(marginal_family f);

/// One-dimensional distribution. Parameter meaning per family:
///   log_normal: a = location of log, b = scale of log
///   gaussian:   a = mean,            b = standard deviation
///   gamma:      a = shape,           b = rate
struct scalar_marginal {
  marginal_family family = marginal_family::log_normal;
  double a = 0.0;
  double b = 1.0;

  double log_density(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
};

/// Independent product of per-dimension marginals from one family.
struct marginal_params {
  marginal_family family = marginal_family::log_normal;
  std::vector<scalar_marginal> dims;
};

marginal_params make_marginal_params(marginal_family family,
                                     std::vector<scalar_marginal> dims);

/// Log density of the multivariate log-normal at m (all entries must be > 0).
double mvln_log_density(const Eigen::VectorXd& m, const mvln_params& p);

double mvn_log_density(const Eigen::VectorXd& x, const mvn_params& p);

/// E[m_k] = exp(mu_k + sigma_kk / 2).
double mvln_mean(const mvln_params& p, std::size_t k);

/// cov(m_k, m_l) = exp(mu_k + mu_l + (sigma_kk + sigma_ll)/2) (exp(sigma_kl) - 1).
double mvln_cov(const mvln_params& p, std::size_t k, std::size_t l);

/// iid sums of per-row log densities. Support violations name the row.
double log_likelihood(const moment_matrix& data, const mvln_params& p);
double log_likelihood(const moment_matrix& data, const mvn_params& p);
double log_likelihood(const moment_matrix& data, const marginal_params& p);

/// Nearest-PSD style repair: eigenvalues below eigen_floor_rel * lambda_max
/// are raised to that floor. Returns the input (symmetrized) when nothing is
/// below the floor.
Eigen::MatrixXd make_positive_definite(const Eigen::MatrixXd& sym,
                                       double eigen_floor_rel = 1e-8);

}  // namespace tmom
