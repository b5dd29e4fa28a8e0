#pragma once

#include <span>

namespace gpeduet::signal {

/// y(t) ~ offset + cos_amp cos(omega t) + sin_amp sin(omega t).
struct SinusoidFit {
  double omega = 0.0;
  double offset = 0.0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares sinusoid fit. The frequency is seeded from mean-crossings of
/// the signal and refined by golden-section search on the residual.
/// Throws std::invalid_argument if fewer than two full crossings are present.
SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y);

/// Residual of the best fit at a fixed angular frequency.
SinusoidFit fit_at_frequency(std::span<const double> t, std::span<const double> y, double omega);

}  // namespace gpeduet::signal
