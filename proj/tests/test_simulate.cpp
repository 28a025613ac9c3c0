#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "fixtures.hpp"
#include "stat_helpers.hpp"
#include "tmom/errors.hpp"
#include "tmom/inference.hpp"
#include "tmom/moments.hpp"
#include "tmom/rng.hpp"
#include "tmom/signal.hpp"
#include "tmom/simulate.hpp"

using namespace tmom;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("near-zero covariance collapses to exp(mu)") {
  VectorXd mu(3);
  mu << -1.0, 0.5, 2.0;
  const MatrixXd sigma = 1e-12 * MatrixXd::Identity(3, 3);
  const auto draws = sample_mvln(mvln_params(mu, sigma), 100, 3);
  for (std::size_t i = 0; i < draws.samples.n_rows(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const double want = std::exp(mu[k]);
      CHECK(std::fabs(draws.samples.values()(Eigen::Index(i), k) - want) /
                want <
            1e-5);
    }
  }
}

TEST_CASE("samples are strictly positive and deterministic") {
  const auto p = fixtures::params(fixtures::lille());
  const auto a = sample_mvln(p, 5000, 99);
  const auto b = sample_mvln(p, 5000, 99);
  const auto c = sample_mvln(p, 5000, 100);
  CHECK((a.samples.values().array() > 0.0).all());
  CHECK((a.samples.values() - b.samples.values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.samples.values() - c.samples.values()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sample mean matches the closed-form mean") {
  const auto p = fixtures::params(fixtures::lund());
  const std::size_t n = 1000000;
  const auto draws = sample_mvln(p, n, 1212);
  const auto& x = draws.samples.values();
  for (int k = 0; k < 3; ++k) {
    const double want = mvln_mean(p, std::size_t(k));
    const double got = x.col(k).mean();
    const double sd =
        std::sqrt((x.col(k).array() - got).square().sum() / double(n - 1));
    CHECK(std::fabs(got - want) < 3.0 * sd / std::sqrt(double(n)));
  }
}

TEST_CASE("log-domain sample covariance recovers sigma") {
  const auto p = fixtures::params(fixtures::aau_hall());
  const auto draws = sample_mvln(p, 10000, 9);
  const MatrixXd logs = draws.samples.values().array().log();
  const VectorXd mean = logs.colwise().mean();
  const MatrixXd centered = logs.rowwise() - mean.transpose();
  const MatrixXd cov = centered.transpose() * centered / double(logs.rows());
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      CHECK(std::fabs(cov(i, j) - p.sigma()(i, j)) /
                std::fabs(p.sigma()(i, j)) <
            0.05);
    }
  }
}

TEST_CASE("each log coordinate passes a KS test against its marginal") {
  const auto p = fixtures::params(fixtures::lund());
  const auto draws = sample_mvln(p, 10000, 31);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> log_col(draws.samples.n_rows());
    for (std::size_t i = 0; i < log_col.size(); ++i) {
      log_col[i] = std::log(draws.samples.values()(Eigen::Index(i), k));
    }
    const double mean = p.mu()[k];
    const double sd = std::sqrt(p.sigma()(k, k));
    const double d = stat_helpers::ks_statistic(log_col, [&](double x) {
      return stat_helpers::normal_cdf(x, mean, sd);
    });
    CHECK(d < stat_helpers::ks_critical(log_col.size(), 0.01));
  }
}

TEST_CASE("standardized samples follow the derived latent laws") {
  const auto p = fixtures::params(fixtures::aau_outdoor());
  const std::size_t n = 10000;
  const auto set = sample_standardized(p, n, 41);
  REQUIRE(set.samples.size() == n);

  std::vector<double> log_p0, log_tau_bar;
  for (const auto& row : set.samples) {
    CHECK(row.p0 > 0.0);
    CHECK(row.tau_rms_s >= 0.0);
    log_p0.push_back(std::log(row.p0));
    log_tau_bar.push_back(std::log(row.tau_bar_s));
  }

  // ln P0 = x0, ln tau_bar = x1 - x0
  const double crit = stat_helpers::ks_critical(n, 0.01);
  CHECK(stat_helpers::ks_statistic(log_p0, [&](double x) {
          return stat_helpers::normal_cdf(x, p.mu()[0],
                                          std::sqrt(p.sigma()(0, 0)));
        }) < crit);
  const double mean_tb = p.mu()[1] - p.mu()[0];
  const double var_tb =
      p.sigma()(0, 0) + p.sigma()(1, 1) - 2.0 * p.sigma()(0, 1);
  CHECK(stat_helpers::ks_statistic(log_tau_bar, [&](double x) {
          return stat_helpers::normal_cdf(x, mean_tb, std::sqrt(var_tb));
        }) < crit);
}

TEST_CASE("ln tau_bar sample moments match the latent contrast") {
  const auto p = fixtures::params(fixtures::lund());
  const std::size_t n = 1000000;
  const auto set = sample_standardized(p, n, 5150);
  double sum = 0.0;
  for (const auto& row : set.samples) sum += std::log(row.tau_bar_s);
  const double mean = sum / double(n);
  double ss = 0.0;
  for (const auto& row : set.samples) {
    const double d = std::log(row.tau_bar_s) - mean;
    ss += d * d;
  }
  const double var = ss / double(n - 1);

  const double want_mean = p.mu()[1] - p.mu()[0];
  const double want_var =
      p.sigma()(0, 0) + p.sigma()(1, 1) - 2.0 * p.sigma()(0, 1);
  CHECK(std::fabs(mean - want_mean) <
        3.0 * std::sqrt(want_var / double(n)));
  CHECK(std::fabs(var - want_var) <
        3.0 * want_var * std::sqrt(2.0 / double(n)));
}

TEST_CASE("standardized correlations reproduce the published model column") {
  const auto& c = fixtures::aau_hall();
  const auto set = sample_standardized(fixtures::params(c), 10000, 1);
  std::vector<double> p0, tb, tr;
  for (const auto& row : set.samples) {
    p0.push_back(row.p0);
    tb.push_back(row.tau_bar_s);
    tr.push_back(row.tau_rms_s);
  }
  CHECK(std::fabs(pearson(p0, tb) - c.model_corr[0]) < 0.03);
  CHECK(std::fabs(pearson(p0, tr) - c.model_corr[1]) < 0.03);
  CHECK(std::fabs(pearson(tb, tr) - c.model_corr[2]) < 0.03);
  CHECK(set.n_rejected < 10);
}

TEST_CASE("rejection reporting and the inconsistency guard") {
  // a latent mean with x0 - 2 x1 + x2 far below zero makes tau_rms^2 < 0 for
  // essentially every draw
  VectorXd mu(3);
  mu << 0.0, 2.0, 0.0;
  const MatrixXd sigma = 0.01 * MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(sample_standardized(mvln_params(mu, sigma), 10, 3),
                  inconsistency_error);

  // borderline mean: some rejections, below the error threshold
  VectorXd mu2(3);
  mu2 << 0.0, -0.25, 0.0;
  const MatrixXd sigma2 = 0.04 * MatrixXd::Identity(3, 3);
  const auto set = sample_standardized(mvln_params(mu2, sigma2), 2000, 3);
  CHECK(set.samples.size() == 2000);
  CHECK(set.n_rejected > 0);
  const auto again = sample_standardized(mvln_params(mu2, sigma2), 2000, 3);
  CHECK(again.n_rejected == set.n_rejected);
}

TEST_CASE("generated channels: point mass at a grid delay") {
  synth_channel_config cfg;
  cfg.mean_paths = 3.0;
  cfg.delta_f_hz = 1.0e6;
  const double period = 1.0 / cfg.delta_f_hz;
  cfg.decay_s = 0.1 * period;
  cfg.n_samples = 256;
  // collapsed delay span = a single physical path delay
  cfg.delay_min_s = cfg.delay_max_s = 0.5 * period;

  const auto chans = generate_channels(cfg, 3, 77);
  for (const auto& chan : chans) {
    // at oversampling 1 the reconstruction grid hits the kernel zeros, so the
    // sampled signal is an exact point mass
    const auto sm = standardize(compute_raw_moments(inverse_transform(chan, 1), 3));
    CHECK(std::fabs(sm.tau_bar_s - 0.5 * period) < 1e-9 * period);
    CHECK(sm.tau_rms_s < 1e-7 * period);  // pure round-off

    // at oversampling 8 the finite bandwidth shows up as the transmitted
    // signal's own spread, sqrt(ln 2 / (pi^2 N_s)) periods
    const auto sm8 =
        standardize(compute_raw_moments(inverse_transform(chan, 8), 3));
    const double predicted =
        period * std::sqrt(std::numbers::ln2 /
                           (std::numbers::pi * std::numbers::pi *
                            double(cfg.n_samples)));
    CHECK(std::fabs(sm8.tau_rms_s - predicted) / predicted < 1e-3);
  }
}

TEST_CASE("noise raises the mean energy by the predicted amount") {
  synth_channel_config cfg;
  cfg.mean_paths = 20.0;
  cfg.delta_f_hz = 1.0e6;
  const double period = 1.0 / cfg.delta_f_hz;
  cfg.decay_s = 0.05 * period;
  cfg.delay_min_s = 0.05 * period;
  cfg.delay_max_s = 0.5 * period;
  cfg.n_samples = 256;

  auto noisy_cfg = cfg;
  noisy_cfg.snr_db = 20.0;

  const std::size_t reps = 2000;
  const auto clean = generate_channels(cfg, reps, 4242);
  const auto noisy = generate_channels(noisy_cfg, reps, 4242);

  // noise substreams are separate, so the clean part matches draw for draw
  double diff_sum = 0.0;
  double predicted_sum = 0.0;
  const double n = double(cfg.n_samples);
  for (std::size_t i = 0; i < reps; ++i) {
    diff_sum += energy(noisy[i]) - energy(clean[i]);
    double mean_power = 0.0;
    for (const auto& v : clean[i].samples) mean_power += std::norm(v);
    mean_power /= n;
    const double noise_var = mean_power * 1e-2;  // 20 dB below signal
    predicted_sum += n * noise_var / (n * n * cfg.delta_f_hz);
  }
  CHECK(std::fabs(diff_sum - predicted_sum) / predicted_sum < 0.10);
}

TEST_CASE("channel generation is deterministic and validates its config") {
  synth_channel_config cfg;
  cfg.mean_paths = 10.0;
  cfg.delta_f_hz = 2.0e6;
  cfg.decay_s = 4.0e-8;
  cfg.delay_min_s = 0.0;
  cfg.delay_max_s = 3.0e-7;
  cfg.n_samples = 64;
  cfg.snr_db = 15.0;

  const auto a = generate_channels(cfg, 4, 5);
  const auto b = generate_channels(cfg, 4, 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t s = 0; s < a[i].n_samples(); ++s) {
      CHECK(a[i].samples[s] == b[i].samples[s]);
    }
  }

  auto bad = cfg;
  bad.delay_max_s = 1.1 / cfg.delta_f_hz;
  CHECK_THROWS_AS(validate(bad), parameter_error);
  bad = cfg;
  bad.mean_paths = 0.0;
  CHECK_THROWS_AS(validate(bad), parameter_error);
  bad = cfg;
  bad.delay_min_s = 2.0e-7;
  bad.delay_max_s = 1.0e-7;
  CHECK_THROWS_AS(validate(bad), parameter_error);
  bad = cfg;
  bad.decay_s = 0.0;
  CHECK_THROWS_AS(validate(bad), parameter_error);
}

TEST_CASE("full pipeline closure: generate, fit, simulate, refit") {
  synth_channel_config cfg;
  cfg.mean_paths = 25.0;
  cfg.delta_f_hz = 1.0e6;
  const double period = 1.0 / cfg.delta_f_hz;
  cfg.decay_s = 0.08 * period;
  cfg.delay_min_s = 0.02 * period;
  cfg.delay_max_s = 0.6 * period;
  cfg.n_samples = 128;
  cfg.snr_db = 30.0;

  const auto channels = generate_channels(cfg, 150, 606);
  const auto matrix = batch_moments(channels, 3, 8);
  const auto first = fit_mvln(matrix);
  const auto& p1 = std::get<mvln_params>(first.model);

  const auto resampled = sample_mvln(p1, 150, 607);
  const auto second = fit_mvln(resampled.samples);
  const auto& p2 = std::get<mvln_params>(second.model);

  std::size_t idx = 0;
  for (int k = 0; k < 3; ++k, ++idx) {
    const double tol = 1.5 * std::hypot(first.ci[idx].half_width,
                                        second.ci[idx].half_width);
    CHECK(std::fabs(p2.mu()[k] - p1.mu()[k]) <= tol);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j, ++idx) {
      const double tol = 1.5 * std::hypot(first.ci[idx].half_width,
                                          second.ci[idx].half_width);
      CHECK(std::fabs(p2.sigma()(i, j) - p1.sigma()(i, j)) <= tol);
    }
  }
}
