#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tmom {

/// Complex channel transfer function sampled on a uniform frequency grid.
struct frequency_response {
  std::vector<std::complex<double>> samples;  // Y_n, n = 0 .. n_samples-1
  double f_start_hz = 0.0;  // absolute frequency of sample 0; metadata only
  double delta_f_hz = 0.0;  // grid spacing, > 0

  std::size_t n_samples() const { return samples.size(); }
  double bandwidth_hz() const {
    return delta_f_hz * double(samples.size() - 1);
  }
  /// Period of the reconstructed time-domain signal, 1 / delta_f.
  double period_s() const { return 1.0 / delta_f_hz; }
};

/// Validates and builds a frequency_response. Throws parameter_error on
/// fewer than two samples, non-positive spacing, or non-finite values.
frequency_response make_frequency_response(
    std::vector<std::complex<double>> samples, double f_start_hz,
    double delta_f_hz);

/// One period of the reconstructed time-domain signal y(t) on the uniform
/// grid t_i = i * period / size, i = 0 .. size-1 (left-closed period).
struct time_signal {
  std::vector<std::complex<double>> values;
  double period_s = 0.0;

  std::size_t size() const { return values.size(); }
  double dt_s() const { return period_s / double(values.size()); }
  double time_at(std::size_t i) const { return dt_s() * double(i); }
};

/// Inverse discrete-frequency Fourier transform,
///   y(t_i) = (1/N_s) sum_n Y_n exp(j 2 pi n delta_f t_i),
/// evaluated on oversampling * N_s points spanning one period.
time_signal inverse_transform(const frequency_response& freq,
                              std::size_t oversampling = 8);

/// Exact value of the period integral of |y(t)|^2: sum |Y_n|^2 / (N_s^2 delta_f).
double energy(const frequency_response& freq);

}  // namespace tmom
