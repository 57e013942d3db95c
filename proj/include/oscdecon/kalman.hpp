#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oscdecon/statespace.hpp"
#include "oscdecon/timeseries.hpp"

namespace oscdecon {

struct FilterState {
  Vector3 s = Vector3::Zero();  ///< (x, v, f)
  Matrix3 P = Matrix3::Zero();
};

struct GainMatrix {
  Vector3 K = Vector3::Zero();
};

struct UpdateResult {
  FilterState state;
  GainMatrix gain;
};

enum class FilterMode { TimeVarying, FixedGain };

/// Riccati fixed point: gain plus the prior/posterior covariances it implies.
struct SteadyState {
  GainMatrix gain;
  Matrix3 P_prior;
  Matrix3 P_post;
  std::size_t iterations = 0;
};

struct SteadyStateOptions {
  double tol = 1e-10;
  std::size_t max_iter = 1'000'000;
  std::optional<Matrix3> P0;  ///< defaults to default_covariance(model)
};

/// Per-sample posterior estimates. In fixed-gain mode `covariances` and `gains`
/// hold a single entry shared by every sample.
struct FilterRunResult {
  std::vector<Vector3> estimates;
  std::vector<Matrix3> covariances;
  std::vector<GainMatrix> gains;
  KalmanModel model;
  FilterMode mode = FilterMode::FixedGain;
  double dt = 1.0;
  double t0 = 0.0;
  std::string units;

  std::size_t size() const { return estimates.size(); }
  FilterState state(std::size_t n) const;
  const GainMatrix& gain(std::size_t n) const;
};

/// s- = phi s, P- = phi P phi^T + Q.
FilterState predict(const FilterState& state, const KalmanModel& model);

/// Scalar measurement update with symmetrized Joseph covariance.
UpdateResult update(const FilterState& state, double z, const KalmanModel& model);

SteadyState steady_state(const KalmanModel& model, const SteadyStateOptions& opts = {});
GainMatrix steady_state_gain(const KalmanModel& model, double tol = 1e-10,
                             std::size_t max_iter = 1'000'000);

/// Force per unit deflection in the pseudostatic equilibrium of phi
/// (1 / force_scale for the oscillator models built here).
double pseudostatic_force_ratio(const KalmanModel& model);

/// P0 = diag(R, 1e3 R, 1e3 sigma_f^2).
Matrix3 default_covariance(const KalmanModel& model);

/// s0 = (z0, 0, pseudostatic force for z0), P0 = default_covariance.
FilterState default_init(double z0, const KalmanModel& model);

/// Slowest decay rate (1/s) of the fixed-gain error dynamics (I - K H) phi.
double closed_loop_decay_rate(const KalmanModel& model, const GainMatrix& gain);

/// Runs the filter over every sample. `init` is the prior for sample 0 (no
/// predict before the first update); defaults to default_init(series[0]).
FilterRunResult run(const TimeSeries& series, const KalmanModel& model,
                    FilterMode mode = FilterMode::FixedGain,
                    std::optional<FilterState> init = std::nullopt);

/// Fixed-gain run with a precomputed gain (skips the Riccati iteration).
FilterRunResult run_fixed(const TimeSeries& series, const KalmanModel& model,
                          const SteadyState& steady, std::optional<FilterState> init = std::nullopt);

}  // namespace oscdecon
