#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tmom/models.hpp"
#include "tmom/moments.hpp"
#include "tmom/signal.hpp"

namespace tmom {

/// Synthetic multipath channel generator: Poisson path count, uniform delays,
/// circular complex Gaussian gains with exponentially decaying variance, and
/// optional additive white measurement noise. Internal test oracle for the
/// full pipeline, not a fitted model.
struct synth_channel_config {
  double mean_paths = 10.0;     // Poisson rate per realization
  double decay_s = 0.0;         // gain variance decay constant
  double delay_min_s = 0.0;
  double delay_max_s = 0.0;     // must stay below 1/delta_f
  std::optional<double> snr_db; // absent = noiseless
  std::size_t n_samples = 0;
  double delta_f_hz = 0.0;
  double f_start_hz = 0.0;
};

void validate(const synth_channel_config& cfg);

struct mvln_sample_result {
  moment_matrix samples;
  double jitter = 0.0;  // diagonal jitter added when the factorization failed
};

/// Draws n rows of m = exp(x), x ~ N(mu, sigma), via the lower Cholesky
/// factor. Row i reads only substream (seed, mvln_rows, i).
mvln_sample_result sample_mvln(const mvln_params& p, std::size_t n,
                               std::uint64_t seed);

struct standardized_sample_set {
  std::vector<standardized_moments> samples;
  std::size_t n_rejected = 0;  // redraws due to a negative variance term
  double jitter = 0.0;
};

/// Samples raw-moment rows and maps them to (P0, tau_bar, tau_rms). Rows with
/// m2/m0 - (m1/m0)^2 < 0 are rejected and redrawn from the same substream;
/// a rejection rate above 50% raises inconsistency_error.
standardized_sample_set sample_standardized(const mvln_params& p, std::size_t n,
                                            std::uint64_t seed);

/// Realization i reads substreams (seed, channel_paths, i) and
/// (seed, channel_noise, i), so the noiseless part of a noisy run equals the
/// noiseless run draw for draw.
std::vector<frequency_response> generate_channels(const synth_channel_config& cfg,
                                                  std::size_t n,
                                                  std::uint64_t seed);

}  // namespace tmom
