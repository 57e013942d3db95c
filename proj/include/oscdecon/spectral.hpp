#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oscdecon/timeseries.hpp"

namespace oscdecon {

/// One-sided power spectrum on the grid k / (N dt), k = 1 .. floor(N/2).
struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  double bin_width_hz = 0.0;

  std::size_t size() const { return freqs_hz.size(); }
};

struct SpectralPeak {
  double freq_hz = 0.0;
  double power = 0.0;
  std::optional<double> damping_rate;  ///< empty when the peak cannot be resolved
};

/// A peak must carry at least this multiple of the median 3-bin band power.
inline constexpr double kPeakSignificance = 10.0;

inline constexpr std::size_t kMinSpectralLength = 16;

/// Hann-windowed periodogram of the mean-removed series. Power is scaled by
/// N / sum(w^2), so sum(power) equals the window-compensated energy of the
/// tapered signal.
Spectrum periodogram(const TimeSeries& series);

/// Significant local maxima (each dominates +-3 bins), strongest first, ties
/// to the lower frequency. Frequencies are refined by a 3-point parabola on
/// log power. No damping estimate is attached.
std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, std::size_t max_count);

/// Strongest interior peak. Throws NoPeak when the spectrum is flat.
SpectralPeak dominant_frequency(const TimeSeries& series);

/// Decay rate from the half-power width of the peak near `freq_hz`:
/// lambda = pi * df_3dB, corrected for the finite record length. Empty when no
/// significant peak sits within two bins of `freq_hz`.
std::optional<double> estimate_damping(const TimeSeries& series, double freq_hz);

/// find_peaks on the periodogram, each peak annotated with estimate_damping.
std::vector<SpectralPeak> top_peaks(const TimeSeries& series, std::size_t max_count = 5);

/// Peak-preserving reduction to at most `max_points` (max power per group).
Spectrum decimate(const Spectrum& spectrum, std::size_t max_points);

}  // namespace oscdecon
