#pragma once

#include <stdexcept>

namespace tmom {

/// Malformed or unreadable input (bad CSV/JSON, missing files). CLI exit code 2.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure while computing (data outside a model's domain, solver breakdown).
/// CLI exit code 1.
struct compute_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Signal is identically zero (or has non-positive total power), so the
/// moment/log pipeline is undefined.
struct degenerate_signal_error : compute_error {
  using compute_error::compute_error;
};

/// Computed quantities violate an analytic constraint by more than the
/// allowed numerical slack.
struct inconsistency_error : compute_error {
  using compute_error::compute_error;
};

/// Data lies outside the support of the requested distribution family.
struct support_error : compute_error {
  using compute_error::compute_error;
};

/// Invalid distribution parameters (non-finite, asymmetric or non-PD covariance, ...).
struct parameter_error : compute_error {
  using compute_error::compute_error;
};

/// Sample covariance is rank deficient; the model cannot be identified.
struct degenerate_data_error : compute_error {
  using compute_error::compute_error;
};

/// An iterative fit or resampling procedure failed to converge.
struct fit_error : compute_error {
  using compute_error::compute_error;
};

}  // namespace tmom
