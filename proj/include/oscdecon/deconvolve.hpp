#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oscdecon/kalman.hpp"
#include "oscdecon/spectral.hpp"
#include "oscdecon/statespace.hpp"
#include "oscdecon/timeseries.hpp"

namespace oscdecon {

struct FilterStageConfig {
  ComplexFrequency omega;
  double sigma_x2 = 1e-3;
  double sigma_f2 = 1e5;
  double force_scale = 1.0;
  std::optional<double> sigma_v2;  ///< overrides Q[1][1]; defaults to sigma_x2

  void validate() const;
};

struct FilterChainConfig {
  std::vector<FilterStageConfig> stages;
  double dt = 1e-3;
  std::size_t post_smooth = 0;  ///< trailing moving-average window, 0 = off

  void validate() const;
};

enum class StageInit {
  FirstSample,  ///< default_init from the stage's first input sample
  Zero,         ///< zero state (used for linearity checks)
};

struct StageReport {
  KalmanModel model;
  SteadyState steady;
  double decay_rate = 0.0;         ///< closed-loop decay of the fixed-gain filter, 1/s
  std::size_t settle_samples = 0;  ///< leading samples dominated by initialization
};

struct CascadeResult {
  TimeSeries force;
  std::vector<StageReport> stages;
};

/// from_complex_root -> continuous_model -> discretize -> build_noise.
/// Throws NyquistViolation when freq_hz >= 1 / (2 dt).
KalmanModel make_stage(const FilterStageConfig& cfg, double dt);

/// Third state component of every estimate, on the input's time grid.
TimeSeries extract_force(const FilterRunResult& result);

/// Stage 1 filters the raw series, each later stage the force output of the
/// previous one; the moving average (if any) runs last.
CascadeResult cascade_detailed(const TimeSeries& series, const FilterChainConfig& chain,
                               StageInit init = StageInit::FirstSample);
TimeSeries cascade(const TimeSeries& series, const FilterChainConfig& chain,
                   StageInit init = StageInit::FirstSample);

/// Causal average over the trailing `window` samples; the first window-1
/// outputs average the available prefix.
TimeSeries moving_average(const TimeSeries& series, std::size_t window);

/// ceil(3 / (rate dt)), clamped to `length`.
std::size_t settle_samples(double decay_rate, double dt, std::size_t length);

/// One stage per peak, strongest first (ties keep the incoming order).
/// Peaks without a damping estimate get damping 0.
FilterChainConfig chain_from_peaks(const std::vector<SpectralPeak>& peaks, double dt,
                                   double sigma_x2, double sigma_f2);

}  // namespace oscdecon
