#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "oscdecon/kalman.hpp"
#include "oscdecon/timeseries.hpp"

namespace oscdecon {

struct ResponsePoint {
  double freq_hz = 0.0;
  double gain = 0.0;  ///< output amplitude / input amplitude
  std::optional<double> phase_deg;
};

/// Any linear, time-invariant series -> series map (a filter, a cascade, a
/// moving average).
using SignalSystem = std::function<TimeSeries(const TimeSeries&)>;

/// Drives `system` with a sinusoid per frequency for a settle prefix of
/// max(5 periods, settle_seconds) plus `cycles` periods, then fits
/// sin/cos/offset over the final `cycles` periods. Results keep the order of
/// `freqs`.
std::vector<ResponsePoint> measure_response(const SignalSystem& system, double dt,
                                            const std::vector<double>& freqs, std::size_t cycles,
                                            double settle_seconds, double amplitude = 1.0);

/// Closed-loop time constants discarded before measuring. The notch gain can be
/// far smaller than the start-up transient, so e^-5 of it is not negligible.
inline constexpr double kSettleTimeConstants = 20.0;

/// Force-channel response of the fixed-gain filter for `model`. The settle
/// prefix covers kSettleTimeConstants closed-loop time constants.
std::vector<ResponsePoint> frequency_response(const KalmanModel& model,
                                              const std::vector<double>& freqs,
                                              std::size_t cycles = 10, double amplitude = 1.0);

/// `points` log-spaced frequencies from f_min to 0.9 Nyquist.
std::vector<double> default_grid(double dt, std::size_t points = 200, double f_min = 0.1);

}  // namespace oscdecon
