#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tmom/models.hpp"
#include "tmom/moments.hpp"

namespace tmom {

enum class model_family {
  mvln,
  mvn,
  indep_log_normal,
  indep_gaussian,
  indep_gamma,
};

/// Canonical family names used in files and on the command line.
const char* family_name(model_family f);
model_family family_from_name(const std::string& name);

/// One confidence-interval half-width, keyed by the canonical parameter name
/// ("mu0", ..., "sigma00", "sigma01", ..., row-major upper triangle).
struct ci_entry {
  std::string name;
  double half_width = 0.0;
};

using fitted_model = std::variant<marginal_params, mvln_params, mvn_params>;

struct fit_result {
  model_family family = model_family::mvln;
  fitted_model model;
  double log_lik = 0.0;
  int n_params = 0;      // free parameter count kappa
  std::size_t n_obs = 0;
  std::vector<ci_entry> ci;  // joint families only
};

/// Closed-form maximum likelihood fit of the multivariate log-normal:
/// mean and covariance of the row-wise logs, covariance with divisor N.
fit_result fit_mvln(const moment_matrix& data);

/// Gaussian MLE on the raw moments (sample mean, covariance divisor N).
fit_result fit_mvn(const moment_matrix& data);

/// Independent per-dimension MLEs; gamma uses a Newton solve on the shape.
fit_result fit_independent(const moment_matrix& data, marginal_family family);

fit_result fit_model(const moment_matrix& data, model_family family);

/// 95% half-widths from the Gaussian Fisher information: the mean block is
/// cov^{-1} and the covariance block is (1/2) tr(cov^{-1} E_m cov^{-1} E_n)
/// over the symmetric basis matrices of the free covariance entries.
std::vector<ci_entry> fisher_ci(const mvln_params& p, std::size_t n_obs);
std::vector<ci_entry> fisher_ci(const mvn_params& p, std::size_t n_obs);

/// Sample Pearson correlation coefficient. Throws on constant input.
double pearson(std::span<const double> a, std::span<const double> b);

/// Gamma MLE for a single positive sample via Newton iteration on
/// ln(shape) - digamma(shape) = ln(mean) - mean(ln x).
struct gamma_fit {
  double shape = 0.0;
  double rate = 0.0;
  int iterations = 0;
};
gamma_fit fit_gamma_mle(std::span<const double> x);

struct corr_interval {
  std::string pair;
  double rho = 0.0;         // point estimate on the full sample
  double half_width = 0.0;  // 1.96 * bootstrap standard error
  double pct_lo = 0.0;      // 2.5% bootstrap percentile
  double pct_hi = 0.0;      // 97.5% bootstrap percentile
  int n_resamples = 0;
  std::size_t n_skipped = 0;  // degenerate resamples that were redrawn
};

struct bootstrap_options {
  std::size_t n_resamples = 1000;
  std::uint64_t seed = 0;
  unsigned n_threads = 1;           // result is bit-identical for any value
  int max_attempts_per_resample = 10;
};

/// Bootstrap confidence half-widths for the Pearson correlations of the given
/// column pairs. Rows are resampled jointly with replacement; resample b reads
/// only substream (seed, bootstrap, b), so parallel and serial runs agree
/// bit-exactly.
std::vector<corr_interval> bootstrap_corr_ci(
    const Eigen::MatrixXd& columns, std::span<const std::string> column_names,
    std::span<const std::pair<int, int>> pairs, const bootstrap_options& opts);

}  // namespace tmom
