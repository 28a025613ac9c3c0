#include "tmom/models.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "tmom/errors.hpp"
#include "tmom/special.hpp"

namespace tmom {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Shared validation for covariance-parameterized families: finite, symmetric
// within relative tolerance, strictly positive definite. Returns the
// symmetrized matrix, its lower Cholesky factor and log determinant.
struct checked_cov {
  Eigen::MatrixXd sym;
  Eigen::MatrixXd chol;
  double log_det;
};

checked_cov check_covariance(const Eigen::VectorXd& center,
                             const Eigen::MatrixXd& cov, const char* what) {
  const Eigen::Index k = center.size();
  if (k < 1) {
    throw parameter_error(std::string(what) + ": empty parameter vector");
  }
  if (cov.rows() != k || cov.cols() != k) {
    throw parameter_error(std::string(what) + ": covariance must be " +
                          std::to_string(k) + "x" + std::to_string(k));
  }
  if (!center.allFinite() || !cov.allFinite()) {
    throw parameter_error(std::string(what) + ": non-finite parameters");
  }
  const double scale = cov.cwiseAbs().maxCoeff();
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) {
    throw parameter_error(std::string(what) + ": covariance is not symmetric");
  }

  checked_cov out;
  out.sym = 0.5 * (cov + cov.transpose());

  // Scale-free definiteness check on the correlation-normalized matrix.
  // Raw-moment covariances in SI units are steeply graded (variances of m0,
  // m1, m2 differ by tens of orders of magnitude), so absolute eigenvalues
  // say nothing about identifiability.
  const Eigen::VectorXd variances = out.sym.diagonal();
  if (!(variances.minCoeff() > 0.0)) {
    throw parameter_error(std::string(what) +
                          ": covariance has a non-positive variance");
  }
  const Eigen::VectorXd scale_sqrt = variances.cwiseSqrt();
  const Eigen::MatrixXd corr =
      out.sym.array() / (scale_sqrt * scale_sqrt.transpose()).array();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) {
    throw parameter_error(std::string(what) + ": eigendecomposition failed");
  }
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (lambda_min <= kCovarianceEigenTol * lambda_max) {
    throw parameter_error(
        std::string(what) + ": covariance is not positive definite "
        "(smallest correlation eigenvalue " + std::to_string(lambda_min) + ")");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(out.sym);
  if (llt.info() != Eigen::Success) {
    throw parameter_error(std::string(what) + ": Cholesky factorization failed");
  }
  out.chol = llt.matrixL();
  out.log_det = 2.0 * out.chol.diagonal().array().log().sum();
  return out;
}

double quad_form_via_chol(const Eigen::MatrixXd& chol_lower,
                          const Eigen::VectorXd& centered) {
  const Eigen::VectorXd w =
      chol_lower.triangularView<Eigen::Lower>().solve(centered);
  return w.squaredNorm();
}

}  // namespace

mvln_params::mvln_params(Eigen::VectorXd mu, Eigen::MatrixXd sigma)
    : mu_(std::move(mu)) {
  auto checked = check_covariance(mu_, sigma, "mvln");
  sigma_ = std::move(checked.sym);
  chol_ = std::move(checked.chol);
  log_det_ = checked.log_det;
}

mvn_params::mvn_params(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)) {
  auto checked = check_covariance(mean_, cov, "mvn");
  cov_ = std::move(checked.sym);
  chol_ = std::move(checked.chol);
  log_det_ = checked.log_det;
}

const char* to_string(marginal_family f) {
  switch (f) {
    case marginal_family::log_normal: return "log-normal";
    case marginal_family::gaussian: return "gaussian";
    case marginal_family::gamma: return "gamma";
  }
  return "?";
}

double scalar_marginal::log_density(double x) const {
  switch (family) {
    case marginal_family::log_normal: {
      if (!(x > 0.0)) {
        throw support_error("log-normal density requires x > 0");
      }
      const double z = (std::log(x) - a) / b;
      return -std::log(x) - std::log(b) - 0.5 * kLog2Pi - 0.5 * z * z;
    }
    case marginal_family::gaussian: {
      const double z = (x - a) / b;
      return -std::log(b) - 0.5 * kLog2Pi - 0.5 * z * z;
    }
    case marginal_family::gamma: {
      if (!(x > 0.0)) {
        throw support_error("gamma density requires x > 0");
      }
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
    }
  }
  throw parameter_error("unknown marginal family");
}

double scalar_marginal::cdf(double x) const {
  switch (family) {
    case marginal_family::log_normal:
      if (x <= 0.0) return 0.0;
      return normal_cdf((std::log(x) - a) / b);
    case marginal_family::gaussian:
      return normal_cdf((x - a) / b);
    case marginal_family::gamma:
      if (x <= 0.0) return 0.0;
      return gamma_p(a, b * x);
  }
  throw parameter_error("unknown marginal family");
}

double scalar_marginal::quantile(double p) const {
  switch (family) {
    case marginal_family::log_normal:
      return std::exp(a + b * normal_quantile(p));
    case marginal_family::gaussian:
      return a + b * normal_quantile(p);
    case marginal_family::gamma:
      return gamma_quantile(a, p) / b;
  }
  throw parameter_error("unknown marginal family");
}

marginal_params make_marginal_params(marginal_family family,
                                     std::vector<scalar_marginal> dims) {
  if (dims.empty()) {
    throw parameter_error("independent model needs at least one dimension");
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    dims[k].family = family;
    if (!std::isfinite(dims[k].a) || !std::isfinite(dims[k].b) ||
        !(dims[k].b > 0.0)) {
      throw parameter_error("invalid marginal parameters in dimension " +
                            std::to_string(k));
    }
    if (family == marginal_family::gamma && !(dims[k].a > 0.0)) {
      throw parameter_error("gamma shape must be positive in dimension " +
                            std::to_string(k));
    }
  }
  return marginal_params{family, std::move(dims)};
}

double mvln_log_density(const Eigen::VectorXd& m, const mvln_params& p) {
  if (std::size_t(m.size()) != p.dims()) {
    throw parameter_error("dimension mismatch in mvln density");
  }
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0) || !std::isfinite(m[k])) {
      throw support_error("mvln density requires strictly positive entries");
    }
  }
  const Eigen::VectorXd log_m = m.array().log();
  const double quad = quad_form_via_chol(p.chol_lower(), log_m - p.mu());
  return -log_m.sum() - 0.5 * double(p.dims()) * kLog2Pi -
         0.5 * p.log_det_sigma() - 0.5 * quad;
}

double mvn_log_density(const Eigen::VectorXd& x, const mvn_params& p) {
  if (std::size_t(x.size()) != p.dims()) {
    throw parameter_error("dimension mismatch in mvn density");
  }
  const double quad = quad_form_via_chol(p.chol_lower(), x - p.mean());
  return -0.5 * double(p.dims()) * kLog2Pi - 0.5 * p.log_det_cov() - 0.5 * quad;
}

double mvln_mean(const mvln_params& p, std::size_t k) {
  if (k >= p.dims()) {
    throw parameter_error("moment index out of range");
  }
  const Eigen::Index i = Eigen::Index(k);
  return std::exp(p.mu()[i] + 0.5 * p.sigma()(i, i));
}

double mvln_cov(const mvln_params& p, std::size_t k, std::size_t l) {
  if (k >= p.dims() || l >= p.dims()) {
    throw parameter_error("moment index out of range");
  }
  const Eigen::Index i = Eigen::Index(k);
  const Eigen::Index j = Eigen::Index(l);
  const double scale = std::exp(p.mu()[i] + p.mu()[j] +
                                0.5 * (p.sigma()(i, i) + p.sigma()(j, j)));
  return scale * std::expm1(p.sigma()(i, j));
}

namespace {

template <typename RowDensity>
double sum_rows(const moment_matrix& data, RowDensity&& density) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    try {
      total += density(data.row_vec(i));
    } catch (const support_error& e) {
      throw support_error("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return total;
}

}  // namespace

double log_likelihood(const moment_matrix& data, const mvln_params& p) {
  return sum_rows(data, [&](const Eigen::VectorXd& row) {
    return mvln_log_density(row, p);
  });
}

double log_likelihood(const moment_matrix& data, const mvn_params& p) {
  return sum_rows(data, [&](const Eigen::VectorXd& row) {
    return mvn_log_density(row, p);
  });
}

double log_likelihood(const moment_matrix& data, const marginal_params& p) {
  if (data.dims() != p.dims.size()) {
    throw parameter_error("dimension mismatch in independent model");
  }
  return sum_rows(data, [&](const Eigen::VectorXd& row) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < row.size(); ++k) {
      sum += p.dims[std::size_t(k)].log_density(row[k]);
    }
    return sum;
  });
}

Eigen::MatrixXd make_positive_definite(const Eigen::MatrixXd& sym,
                                       double eigen_floor_rel) {
  if (sym.rows() != sym.cols()) {
    throw parameter_error("make_positive_definite requires a square matrix");
  }
  const Eigen::MatrixXd s = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) {
    throw parameter_error("eigendecomposition failed");
  }
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (!(lambda_max > 0.0)) {
    throw parameter_error("matrix has no positive eigenvalue");
  }
  const double floor = eigen_floor_rel * lambda_max;
  if (eig.eigenvalues().minCoeff() >= floor) {
    return s;
  }
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd repaired =
      eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (repaired + repaired.transpose());
}

}  // namespace tmom
