#include "tmom/inference.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "tmom/errors.hpp"
#include "tmom/rng.hpp"
#include "tmom/special.hpp"

namespace tmom {

namespace {

constexpr double kZ95 = 1.96;

void require_positive(const moment_matrix& data) {
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < data.dims(); ++j) {
      const double v = data.values()(Eigen::Index(i), Eigen::Index(j));
      if (!(v > 0.0)) {
        throw support_error("row " + std::to_string(i) + ", m" +
                            std::to_string(j) +
                            " is not strictly positive: " + std::to_string(v));
      }
    }
  }
}

// Mean vector and MLE covariance (divisor N) of the given data matrix.
void mean_and_mle_cov(const Eigen::MatrixXd& x, Eigen::VectorXd& mean,
                      Eigen::MatrixXd& cov) {
  const double n = double(x.rows());
  mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  cov = (centered.transpose() * centered) / n;
}

void check_rank(const Eigen::MatrixXd& cov, const char* what) {
  // Identifiability is judged on the correlation matrix so that the steeply
  // graded raw-moment scales (second^0 .. second^{K-1}) do not masquerade as
  // rank deficiency.
  const Eigen::VectorXd variances = cov.diagonal();
  if (!(variances.minCoeff() > 0.0)) {
    throw degenerate_data_error(std::string(what) +
                                ": a dimension has zero sample variance");
  }
  const Eigen::VectorXd scale_sqrt = variances.cwiseSqrt();
  const Eigen::MatrixXd corr =
      cov.array() / (scale_sqrt * scale_sqrt.transpose()).array();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (lambda_min <= kCovarianceEigenTol * lambda_max) {
    throw degenerate_data_error(
        std::string(what) +
        ": sample covariance is rank deficient (smallest correlation "
        "eigenvalue " +
        std::to_string(lambda_min) + ")");
  }
}

int joint_param_count(std::size_t k) {
  return int(k + k * (k + 1) / 2);
}

std::vector<std::pair<int, int>> upper_triangle_pairs(std::size_t k) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < int(k); ++i) {
    for (int j = i; j < int(k); ++j) {
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

std::vector<ci_entry> fisher_ci_impl(const Eigen::MatrixXd& cov,
                                     std::size_t n_obs) {
  if (n_obs < 2) {
    throw parameter_error("fisher_ci requires at least 2 observations");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw parameter_error("fisher_ci: covariance is not positive definite");
  }

  // Half-widths are (1.96/sqrt(N)) sqrt((I^-1)_mm) for the block-diagonal
  // Gaussian information matrix: I(mean) = cov^-1 and, over the symmetric
  // basis E_m of the free covariance entries,
  //   I(cov)_mn = (1/2) tr(cov^-1 E_m cov^-1 E_n).
  // That matrix has the closed-form inverse
  //   (I(mean)^-1)_kk        = cov_kk
  //   (I(cov)^-1)_(ij),(ij)  = cov_ii cov_jj + cov_ij^2,
  // which is evaluated directly: forming I(cov) and inverting it squares the
  // condition number of cov and breaks down for the nearly singular fitted
  // covariances this data produces (latent correlations up to 0.99+).
  const std::size_t k = std::size_t(cov.rows());
  const auto pairs = upper_triangle_pairs(k);

  std::vector<ci_entry> out;
  out.reserve(k + pairs.size());
  const double scale = kZ95 / std::sqrt(double(n_obs));
  for (std::size_t m = 0; m < k; ++m) {
    out.push_back({"mu" + std::to_string(m),
                   scale * std::sqrt(cov(Eigen::Index(m), Eigen::Index(m)))});
  }
  for (const auto& [i, j] : pairs) {
    const double avar = cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j);
    out.push_back({"sigma" + std::to_string(i) + std::to_string(j),
                   scale * std::sqrt(avar)});
  }
  return out;
}

}  // namespace

const char* family_name(model_family f) {
  switch (f) {
    case model_family::mvln: return "mvln";
    case model_family::mvn: return "mvn";
    case model_family::indep_log_normal: return "indep-lognormal";
    case model_family::indep_gaussian: return "indep-gaussian";
    case model_family::indep_gamma: return "indep-gamma";
  }
  return "?";
}

model_family family_from_name(const std::string& name) {
  if (name == "mvln") return model_family::mvln;
  if (name == "mvn") return model_family::mvn;
  if (name == "indep-lognormal") return model_family::indep_log_normal;
  if (name == "indep-gaussian") return model_family::indep_gaussian;
  if (name == "indep-gamma") return model_family::indep_gamma;
  throw input_error("unknown model family: " + name);
}

fit_result fit_mvln(const moment_matrix& data) {
  const std::size_t k = data.dims();
  if (data.n_rows() < k + 1) {
    throw degenerate_data_error("mvln fit needs at least K+1 rows");
  }
  require_positive(data);

  const Eigen::MatrixXd logs = data.values().array().log();
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  mean_and_mle_cov(logs, mu, sigma);
  check_rank(sigma, "mvln fit");

  fit_result out;
  out.family = model_family::mvln;
  out.model = mvln_params(mu, sigma);
  out.log_lik = log_likelihood(data, std::get<mvln_params>(out.model));
  out.n_params = joint_param_count(k);
  out.n_obs = data.n_rows();
  out.ci = fisher_ci(std::get<mvln_params>(out.model), out.n_obs);
  return out;
}

fit_result fit_mvn(const moment_matrix& data) {
  const std::size_t k = data.dims();
  if (data.n_rows() < k + 1) {
    throw degenerate_data_error("mvn fit needs at least K+1 rows");
  }
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  mean_and_mle_cov(data.values(), mean, cov);
  check_rank(cov, "mvn fit");

  fit_result out;
  out.family = model_family::mvn;
  out.model = mvn_params(mean, cov);
  out.log_lik = log_likelihood(data, std::get<mvn_params>(out.model));
  out.n_params = joint_param_count(k);
  out.n_obs = data.n_rows();
  out.ci = fisher_ci(std::get<mvn_params>(out.model), out.n_obs);
  return out;
}

gamma_fit fit_gamma_mle(std::span<const double> x) {
  if (x.size() < 2) {
    throw degenerate_data_error("gamma fit needs at least 2 samples");
  }
  double sum = 0.0;
  double sum_log = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) {
      throw support_error("gamma fit requires strictly positive data");
    }
    sum += v;
    sum_log += std::log(v);
  }
  const double mean = sum / double(x.size());
  const double mean_log = sum_log / double(x.size());
  const double s = std::log(mean) - mean_log;  // >= 0 by Jensen
  if (!(s > 0.0)) {
    throw degenerate_data_error("gamma fit: data is (numerically) constant");
  }

  double shape = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) /
                 (12.0 * s);
  gamma_fit out;
  for (int iter = 1; iter <= 100; ++iter) {
    const double f = std::log(shape) - digamma(shape) - s;
    const double df = 1.0 / shape - trigamma(shape);
    double next = shape - f / df;
    if (!(next > 0.0)) next = 0.5 * shape;
    out.iterations = iter;
    if (std::fabs(next - shape) <= 1e-10 * std::max(1.0, shape)) {
      shape = next;
      out.shape = shape;
      out.rate = shape / mean;
      return out;
    }
    shape = next;
  }
  throw fit_error("gamma shape solve did not converge; residual " +
                  std::to_string(std::log(shape) - digamma(shape) - s));
}

fit_result fit_independent(const moment_matrix& data, marginal_family family) {
  const std::size_t k = data.dims();
  if (data.n_rows() < 2) {
    throw degenerate_data_error("independent fit needs at least 2 rows");
  }
  if (family == marginal_family::log_normal || family == marginal_family::gamma) {
    require_positive(data);
  }

  std::vector<scalar_marginal> dims(k);
  switch (family) {
    case marginal_family::log_normal: {
      // Same closed forms as the joint log-normal fit: per-dimension mean and
      // MLE variance of the logs.
      const Eigen::MatrixXd logs = data.values().array().log();
      Eigen::VectorXd mu;
      Eigen::MatrixXd cov;
      mean_and_mle_cov(logs, mu, cov);
      for (std::size_t j = 0; j < k; ++j) {
        const double var = cov(Eigen::Index(j), Eigen::Index(j));
        if (!(var > 0.0)) {
          throw degenerate_data_error("log-normal fit: dimension " +
                                      std::to_string(j) + " is constant");
        }
        dims[j] = {family, mu[Eigen::Index(j)], std::sqrt(var)};
      }
      break;
    }
    case marginal_family::gaussian: {
      Eigen::VectorXd mean;
      Eigen::MatrixXd cov;
      mean_and_mle_cov(data.values(), mean, cov);
      for (std::size_t j = 0; j < k; ++j) {
        const double var = cov(Eigen::Index(j), Eigen::Index(j));
        if (!(var > 0.0)) {
          throw degenerate_data_error("gaussian fit: dimension " +
                                      std::to_string(j) + " is constant");
        }
        dims[j] = {family, mean[Eigen::Index(j)], std::sqrt(var)};
      }
      break;
    }
    case marginal_family::gamma: {
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> column(data.n_rows());
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
          column[i] = data.values()(Eigen::Index(i), Eigen::Index(j));
        }
        const gamma_fit g = fit_gamma_mle(column);
        dims[j] = {family, g.shape, g.rate};
      }
      break;
    }
  }

  fit_result out;
  switch (family) {
    case marginal_family::log_normal: out.family = model_family::indep_log_normal; break;
    case marginal_family::gaussian: out.family = model_family::indep_gaussian; break;
    case marginal_family::gamma: out.family = model_family::indep_gamma; break;
  }
  out.model = make_marginal_params(family, std::move(dims));
  out.log_lik = log_likelihood(data, std::get<marginal_params>(out.model));
  out.n_params = int(2 * k);
  out.n_obs = data.n_rows();
  return out;
}

fit_result fit_model(const moment_matrix& data, model_family family) {
  switch (family) {
    case model_family::mvln: return fit_mvln(data);
    case model_family::mvn: return fit_mvn(data);
    case model_family::indep_log_normal:
      return fit_independent(data, marginal_family::log_normal);
    case model_family::indep_gaussian:
      return fit_independent(data, marginal_family::gaussian);
    case model_family::indep_gamma:
      return fit_independent(data, marginal_family::gamma);
  }
  throw parameter_error("unknown model family");
}

std::vector<ci_entry> fisher_ci(const mvln_params& p, std::size_t n_obs) {
  return fisher_ci_impl(p.sigma(), n_obs);
}

std::vector<ci_entry> fisher_ci(const mvn_params& p, std::size_t n_obs) {
  return fisher_ci_impl(p.cov(), n_obs);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw parameter_error("pearson requires equal-length samples");
  }
  if (a.size() < 2) {
    throw parameter_error("pearson requires at least 2 paired samples");
  }
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= double(a.size());
  mean_b /= double(b.size());

  double cross = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cross += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (!(var_a > 0.0) || !(var_b > 0.0)) {
    throw degenerate_data_error("pearson is undefined for constant input");
  }
  return cross / (std::sqrt(var_a) * std::sqrt(var_b));
}

namespace {

struct resample_stat {
  std::vector<double> rho;  // one per pair
  std::size_t skipped = 0;
};

resample_stat one_resample(const Eigen::MatrixXd& columns,
                           std::span<const std::pair<int, int>> pairs,
                           std::uint64_t seed, std::size_t index,
                           int max_attempts) {
  const std::size_t n = std::size_t(columns.rows());
  rng_stream stream(seed, rng_stream::kind::bootstrap, index);
  std::vector<std::size_t> idx(n);
  resample_stat out;
  out.rho.resize(pairs.size());

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = std::size_t(stream.next_below(n));
    }
    bool degenerate = false;
    for (std::size_t p = 0; p < pairs.size() && !degenerate; ++p) {
      for (int col : {pairs[p].first, pairs[p].second}) {
        const double first = columns(Eigen::Index(idx[0]), col);
        bool constant = true;
        for (std::size_t i = 1; i < n; ++i) {
          if (columns(Eigen::Index(idx[i]), col) != first) {
            constant = false;
            break;
          }
        }
        if (constant) {
          degenerate = true;
          break;
        }
      }
    }
    if (degenerate) {
      ++out.skipped;
      continue;
    }
    std::vector<double> a(n), b(n);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = columns(Eigen::Index(idx[i]), pairs[p].first);
        b[i] = columns(Eigen::Index(idx[i]), pairs[p].second);
      }
      out.rho[p] = pearson(a, b);
    }
    return out;
  }
  throw fit_error("bootstrap resample " + std::to_string(index) +
                  " stayed degenerate after " + std::to_string(max_attempts) +
                  " attempts");
}

}  // namespace

std::vector<corr_interval> bootstrap_corr_ci(
    const Eigen::MatrixXd& columns, std::span<const std::string> column_names,
    std::span<const std::pair<int, int>> pairs, const bootstrap_options& opts) {
  const std::size_t n = std::size_t(columns.rows());
  if (opts.n_resamples < 100) {
    throw parameter_error("bootstrap needs at least 100 resamples");
  }
  if (n < 10) {
    throw parameter_error("bootstrap needs at least 10 paired samples");
  }
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= columns.cols() || j >= columns.cols()) {
      throw parameter_error("bootstrap pair index out of range");
    }
  }

  const std::size_t b_total = opts.n_resamples;
  std::vector<std::vector<double>> rho_boot(
      pairs.size(), std::vector<double>(b_total, 0.0));
  std::vector<std::size_t> skipped(b_total, 0);

  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const resample_stat stat = one_resample(columns, pairs, opts.seed, b,
                                              opts.max_attempts_per_resample);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        rho_boot[p][b] = stat.rho[p];
      }
      skipped[b] = stat.skipped;
    }
  };

  const unsigned n_threads =
      std::min<unsigned>(std::max(1u, opts.n_threads), unsigned(b_total));
  if (n_threads <= 1) {
    run_range(0, b_total);
  } else {
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (b_total + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const std::size_t begin = std::size_t(t) * chunk;
      const std::size_t end = std::min(b_total, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::size_t total_skipped = 0;
  for (std::size_t b = 0; b < b_total; ++b) total_skipped += skipped[b];

  std::vector<corr_interval> out;
  out.reserve(pairs.size());
  std::vector<double> a(n), b_col(n);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = columns(Eigen::Index(i), pairs[p].first);
      b_col[i] = columns(Eigen::Index(i), pairs[p].second);
    }
    corr_interval ci;
    ci.pair = std::string(column_names[std::size_t(pairs[p].first)]) + "_" +
              std::string(column_names[std::size_t(pairs[p].second)]);
    ci.rho = pearson(a, b_col);
    ci.n_resamples = int(b_total);
    ci.n_skipped = total_skipped;

    const std::vector<double>& rho = rho_boot[p];
    double mean = 0.0;
    for (double r : rho) mean += r;
    mean /= double(b_total);
    double ss = 0.0;
    for (double r : rho) ss += (r - mean) * (r - mean);
    ci.half_width = kZ95 * std::sqrt(ss / double(b_total - 1));

    std::vector<double> sorted = rho;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile_type7 = [&](double prob) {
      const double h = (double(sorted.size()) - 1.0) * prob;
      const std::size_t lo = std::size_t(std::floor(h));
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
    };
    ci.pct_lo = quantile_type7(0.025);
    ci.pct_hi = quantile_type7(0.975);
    out.push_back(std::move(ci));
  }
  return out;
}

}  // namespace tmom
