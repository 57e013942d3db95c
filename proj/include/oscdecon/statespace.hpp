#pragma once

#include <optional>

#include <Eigen/Dense>

namespace oscdecon {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;
using RowVector3 = Eigen::RowVector3d;

/// Damped oscillator  x'' + a x' + b x = b * force_scale * f.
///
/// a is the damping coefficient (1/s), b the squared angular frequency
/// (rad^2/s^2). Mass, damping and stiffness are never stored individually:
/// only their ratios are observable from a transient. With force_scale = 1 the
/// pseudostatic deflection equals the force, so x and f share units.
struct OscillatorParams {
  double a = 0.0;
  double b = 1.0;
  double force_scale = 1.0;

  /// Throws InvalidArgument unless a >= 0, b > 0, force_scale > 0 (all finite).
  void validate() const;
  bool underdamped() const { return a * a / 4.0 < b; }
};

/// Observed transient: ring frequency and exponential decay rate.
struct ComplexFrequency {
  double freq_hz = 1.0;
  double damping_rate = 0.0;

  void validate() const;
};

/// Continuous generator for the state (x, v, f).
struct ContinuousModel {
  Matrix3 A = Matrix3::Zero();
};

/// Discretized filter model.
struct KalmanModel {
  Matrix3 phi = Matrix3::Identity();
  RowVector3 H{1.0, 0.0, 0.0};
  Matrix3 Q = Matrix3::Identity();
  double R = 1.0;
  double dt = 1.0;

  void validate() const;
};

struct NoiseModel {
  Matrix3 Q;
  double R;
};

OscillatorParams from_complex_root(const ComplexFrequency& omega);

/// Inverse of from_complex_root. Throws Overdamped when a^2/4 >= b.
ComplexFrequency characteristic_ring(const OscillatorParams& params);

ContinuousModel continuous_model(const OscillatorParams& params);

/// e^{A t} for any 3x3 A (scaling and squaring around a degree-18 Taylor
/// polynomial). t == 0 returns the identity; t < 0 is rejected.
Matrix3 expm(const Matrix3& A, double t);

/// phi = e^{A dt}; rejects dt <= 0.
Matrix3 discretize(const ContinuousModel& model, double dt);

/// Q = diag(sx2, sv2, sf2), R = sx2 where sv2 defaults to sx2.
NoiseModel build_noise(double sigma_x2, double sigma_f2,
                       std::optional<double> sigma_v2 = std::nullopt);

KalmanModel make_model(const OscillatorParams& params, double dt, double sigma_x2,
                       double sigma_f2, std::optional<double> sigma_v2 = std::nullopt);

}  // namespace oscdecon
