#include "tmom/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "tmom/errors.hpp"

namespace tmom {

frequency_response make_frequency_response(
    std::vector<std::complex<double>> samples, double f_start_hz,
    double delta_f_hz) {
  if (samples.size() < 2) {
    throw parameter_error("frequency response needs at least 2 samples, got " +
                          std::to_string(samples.size()));
  }
  if (!(delta_f_hz > 0.0) || !std::isfinite(delta_f_hz)) {
    throw parameter_error("frequency spacing must be positive and finite");
  }
  if (!std::isfinite(f_start_hz)) {
    throw parameter_error("start frequency must be finite");
  }
  for (std::size_t n = 0; n < samples.size(); ++n) {
    if (!std::isfinite(samples[n].real()) || !std::isfinite(samples[n].imag())) {
      throw parameter_error("non-finite sample at index " + std::to_string(n));
    }
  }
  return frequency_response{std::move(samples), f_start_hz, delta_f_hz};
}

time_signal inverse_transform(const frequency_response& freq,
                              std::size_t oversampling) {
  if (oversampling == 0) {
    throw parameter_error("oversampling must be >= 1");
  }
  make_frequency_response(freq.samples, freq.f_start_hz, freq.delta_f_hz);

  const std::size_t n = freq.samples.size();
  const std::size_t len = n * oversampling;
  const double scale = 1.0 / double(n);

  std::vector<std::complex<double>> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    // Horner evaluation of the polynomial sum_n Y_n w^n at w = e^{j 2 pi i / len}.
    // One transcendental call per grid point; rounding grows like sqrt(n) ulp.
    const double angle = 2.0 * std::numbers::pi * double(i) / double(len);
    const std::complex<double> w = std::polar(1.0, angle);
    std::complex<double> acc = freq.samples[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
      acc = acc * w + freq.samples[k];
    }
    out[i] = acc * scale;
  }
  return time_signal{std::move(out), freq.period_s()};
}

double energy(const frequency_response& freq) {
  make_frequency_response(freq.samples, freq.f_start_hz, freq.delta_f_hz);
  double sum = 0.0;
  for (const auto& y : freq.samples) {
    sum += std::norm(y);
  }
  const double n = double(freq.samples.size());
  return sum / (n * n * freq.delta_f_hz);
}

}  // namespace tmom
