#include "tmom/simulate.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "tmom/errors.hpp"
#include "tmom/rng.hpp"

namespace tmom {

namespace {

constexpr std::size_t kMaxAttemptsPerRow = 1000;

struct chol_with_jitter {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

chol_with_jitter factor_sigma(const mvln_params& p) {
  chol_with_jitter out;
  Eigen::LLT<Eigen::MatrixXd> llt(p.sigma());
  if (llt.info() == Eigen::Success) {
    out.lower = llt.matrixL();
    return out;
  }
  // Parameters passed the eigenvalue check but the factorization still broke
  // down; retry once with a small diagonal jitter and report it.
  out.jitter = 1e-12 * p.sigma().trace() / double(p.dims());
  Eigen::MatrixXd bumped = p.sigma();
  bumped.diagonal().array() += out.jitter;
  Eigen::LLT<Eigen::MatrixXd> retry(bumped);
  if (retry.info() != Eigen::Success) {
    throw parameter_error("sigma factorization failed even with jitter");
  }
  out.lower = retry.matrixL();
  return out;
}

Eigen::VectorXd draw_raw_row(const mvln_params& p, const Eigen::MatrixXd& lower,
                             rng_stream& stream) {
  Eigen::VectorXd z(p.dims());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    z[k] = stream.next_normal();
  }
  return (p.mu() + lower * z).array().exp();
}

}  // namespace

mvln_sample_result sample_mvln(const mvln_params& p, std::size_t n,
                               std::uint64_t seed) {
  if (n < 1) {
    throw parameter_error("sample count must be >= 1");
  }
  const chol_with_jitter factor = factor_sigma(p);
  Eigen::MatrixXd rows(n, p.dims());
  for (std::size_t i = 0; i < n; ++i) {
    rng_stream stream(seed, rng_stream::kind::mvln_rows, i);
    rows.row(Eigen::Index(i)) = draw_raw_row(p, factor.lower, stream).transpose();
  }
  return mvln_sample_result{moment_matrix(std::move(rows)), factor.jitter};
}

standardized_sample_set sample_standardized(const mvln_params& p, std::size_t n,
                                            std::uint64_t seed) {
  if (p.dims() < 3) {
    throw parameter_error("standardized sampling needs K >= 3");
  }
  if (n < 1) {
    throw parameter_error("sample count must be >= 1");
  }
  const chol_with_jitter factor = factor_sigma(p);

  standardized_sample_set out;
  out.jitter = factor.jitter;
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rng_stream stream(seed, rng_stream::kind::standardized_rows, i);
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < kMaxAttemptsPerRow; ++attempt) {
      const Eigen::VectorXd m = draw_raw_row(p, factor.lower, stream);
      const double tau_bar = m[1] / m[0];
      const double variance = m[2] / m[0] - tau_bar * tau_bar;
      if (variance < 0.0) {
        ++out.n_rejected;
        continue;
      }
      out.samples.push_back({m[0], tau_bar, std::sqrt(variance)});
      accepted = true;
      break;
    }
    if (!accepted) {
      throw inconsistency_error(
          "standardized sampling rejected " + std::to_string(kMaxAttemptsPerRow) +
          " consecutive draws; model is inconsistent with tau_rms >= 0");
    }
  }
  if (out.n_rejected > out.samples.size()) {
    throw inconsistency_error(
        "standardized sampling rejection rate above 50% (" +
        std::to_string(out.n_rejected) + " rejected for " +
        std::to_string(out.samples.size()) + " accepted)");
  }
  return out;
}

void validate(const synth_channel_config& cfg) {
  if (!(cfg.mean_paths > 0.0)) {
    throw parameter_error("mean path count must be positive");
  }
  if (!(cfg.decay_s > 0.0)) {
    throw parameter_error("decay constant must be positive");
  }
  if (cfg.n_samples < 2) {
    throw parameter_error("n_samples must be >= 2");
  }
  if (!(cfg.delta_f_hz > 0.0)) {
    throw parameter_error("delta_f must be positive");
  }
  if (cfg.delay_min_s < 0.0 || cfg.delay_max_s < cfg.delay_min_s) {
    throw parameter_error("delay span must satisfy 0 <= min <= max");
  }
  const double period = 1.0 / cfg.delta_f_hz;
  if (!(cfg.delay_max_s < period)) {
    throw parameter_error("delay span must stay below 1/delta_f to avoid aliasing");
  }
  if (cfg.snr_db && !std::isfinite(*cfg.snr_db)) {
    throw parameter_error("snr must be finite when present");
  }
}

std::vector<frequency_response> generate_channels(const synth_channel_config& cfg,
                                                  std::size_t n,
                                                  std::uint64_t seed) {
  validate(cfg);
  if (n < 1) {
    throw parameter_error("realization count must be >= 1");
  }

  std::vector<frequency_response> out;
  out.reserve(n);
  const std::size_t n_samples = cfg.n_samples;

  for (std::size_t i = 0; i < n; ++i) {
    rng_stream paths(seed, rng_stream::kind::channel_paths, i);

    std::uint64_t n_paths = 0;
    while (n_paths == 0) {
      n_paths = paths.next_poisson(cfg.mean_paths);
    }

    std::vector<std::complex<double>> h(n_samples, {0.0, 0.0});
    for (std::uint64_t path = 0; path < n_paths; ++path) {
      const double delay = paths.next_uniform(cfg.delay_min_s, cfg.delay_max_s);
      const double sd = std::sqrt(0.5 * std::exp(-delay / cfg.decay_s));
      const std::complex<double> gain(sd * paths.next_normal(),
                                      sd * paths.next_normal());
      // H_n += gain * exp(-j 2 pi n delta_f delay), built by phase recurrence.
      const std::complex<double> rot =
          std::polar(1.0, -2.0 * std::numbers::pi * cfg.delta_f_hz * delay);
      std::complex<double> phase(1.0, 0.0);
      for (std::size_t s = 0; s < n_samples; ++s) {
        h[s] += gain * phase;
        phase *= rot;
      }
    }

    if (cfg.snr_db) {
      double mean_power = 0.0;
      for (const auto& v : h) mean_power += std::norm(v);
      mean_power /= double(n_samples);
      const double noise_sd =
          std::sqrt(0.5 * mean_power * std::pow(10.0, -*cfg.snr_db / 10.0));
      rng_stream noise(seed, rng_stream::kind::channel_noise, i);
      for (auto& v : h) {
        v += std::complex<double>(noise_sd * noise.next_normal(),
                                  noise_sd * noise.next_normal());
      }
    }

    out.push_back(
        make_frequency_response(std::move(h), cfg.f_start_hz, cfg.delta_f_hz));
  }
  return out;
}

}  // namespace tmom
