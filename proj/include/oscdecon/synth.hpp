#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oscdecon/statespace.hpp"
#include "oscdecon/timeseries.hpp"

namespace oscdecon {

struct Pulse {
  double t0 = 0.0;
  double t1 = 0.0;
  double amplitude = 0.0;
};

/// Prescribed external force. Pulse edges are half-open, [t0, t1).
struct ForceProfile {
  enum class Kind { Zero, Pulse, Step, MultiPulse };

  Kind kind = Kind::Zero;
  double t0 = 0.0;
  double t1 = 0.0;
  double amplitude = 0.0;
  std::vector<Pulse> pulses;  ///< MultiPulse only; overlapping pulses add

  void validate() const;
  /// Force at sample n of a grid with spacing dt (edges snapped to samples).
  double at_sample(std::size_t n, double dt) const;
};

/// Additive ringing A e^{-lambda (t - ts)} sin(2 pi f (t - ts)) for t >= ts.
struct Transient {
  double freq_hz = 1.0;
  double amplitude = 1.0;
  double damping_rate = 0.0;
  double start_time = 0.0;
};

struct SimConfig {
  OscillatorParams params;
  ForceProfile profile;
  double dt = 1e-3;
  double duration = 3.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Transient> transients;
  double x0 = 0.0;  ///< initial deflection
  double v0 = 0.0;  ///< initial velocity
  std::string units;
  int substeps = 10;  ///< RK4 steps per sample interval

  void validate() const;
  std::size_t samples() const;
};

struct SimResult {
  TimeSeries measured;     ///< deflection + transients + noise
  TimeSeries truth_force;  ///< noiseless f at each sample
  TimeSeries position;     ///< noiseless deflection
  TimeSeries velocity;
};

/// Integrates x'' + a x' + b x = b s f with classical RK4, holding f constant
/// over each sample interval. Rejects dt > 0.1 / sqrt(b) as Unstable.
SimResult simulate(const SimConfig& cfg);

/// Standard normal deviates from std::mt19937_64 via Box-Muller:
///   u1 = ((k1 >> 11) + 0.5) 2^-53,  u2 = ((k2 >> 11) + 0.5) 2^-53,
///   r = sqrt(-2 ln u1),  z = r cos(2 pi u2), then r sin(2 pi u2).
/// Both engine and transform are fully specified, so a seed reproduces the
/// same stream on any conforming platform.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace oscdecon
