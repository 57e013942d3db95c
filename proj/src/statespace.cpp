#include "oscdecon/statespace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

constexpr int kTaylorDegree = 18;
// After scaling, ||A t / 2^s||_1 <= 0.5, so the truncation term is below
// 0.5^19 / 19! ~ 1.6e-23.
constexpr double kScaledNormBound = 0.5;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void OscillatorParams::validate() const {
  require(finite(a) && finite(b) && finite(force_scale), "oscillator parameters must be finite");
  require(a >= 0.0, "damping coefficient a must be >= 0, got " + std::to_string(a));
  require(b > 0.0, "stiffness ratio b must be > 0, got " + std::to_string(b));
  require(force_scale > 0.0, "force_scale must be > 0");
}

void ComplexFrequency::validate() const {
  require(finite(freq_hz) && finite(damping_rate), "complex frequency must be finite");
  require(freq_hz > 0.0, "freq_hz must be > 0, got " + std::to_string(freq_hz));
  require(damping_rate >= 0.0, "damping_rate must be >= 0, got " + std::to_string(damping_rate));
}

void KalmanModel::validate() const {
  require(phi.allFinite() && Q.allFinite() && finite(R) && finite(dt), "model must be finite");
  require(dt > 0.0, "model dt must be > 0");
  require(H == RowVector3(1.0, 0.0, 0.0), "measurement row must be (1, 0, 0)");
  require(R > 0.0, "measurement variance R must be > 0");
  require(Q.isDiagonal(0.0) && (Q.diagonal().array() >= 0.0).all(),
          "process covariance Q must be diagonal and nonnegative");
  require(phi.determinant() > 0.0, "transition matrix must have positive determinant");
}

OscillatorParams from_complex_root(const ComplexFrequency& omega) {
  omega.validate();
  const double w = 2.0 * std::numbers::pi * omega.freq_hz;
  OscillatorParams p;
  p.a = 2.0 * omega.damping_rate;
  p.b = w * w + omega.damping_rate * omega.damping_rate;
  return p;
}

ComplexFrequency characteristic_ring(const OscillatorParams& params) {
  params.validate();
  const double half = params.a / 2.0;
  const double disc = params.b - half * half;
  if (!(disc > 0.0)) {
    throw Error(ErrorCode::Overdamped, "a^2/4 >= b (a=" + std::to_string(params.a) +
                                           ", b=" + std::to_string(params.b) + ")");
  }
  return {std::sqrt(disc) / (2.0 * std::numbers::pi), half};
}

ContinuousModel continuous_model(const OscillatorParams& params) {
  params.validate();
  ContinuousModel m;
  m.A << 0.0, 1.0, 0.0,
         -params.b, -params.a, params.b * params.force_scale,
         0.0, 0.0, 0.0;
  return m;
}

Matrix3 expm(const Matrix3& A, double t) {
  require(std::isfinite(t) && t >= 0.0, "time step must be finite and >= 0");
  require(A.allFinite(), "generator must be finite");
  if (t == 0.0) return Matrix3::Identity();

  const Matrix3 At = A * t;
  const double norm = At.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormBound)));
  }
  const Matrix3 X = At * std::ldexp(1.0, -squarings);

  // Horner: I + X(I + X/2(I + X/3(...)))
  Matrix3 E = Matrix3::Identity();
  for (int k = kTaylorDegree; k >= 1; --k) {
    E = Matrix3::Identity() + (X * E) / static_cast<double>(k);
  }
  for (int i = 0; i < squarings; ++i) E = E * E;
  return E;
}

Matrix3 discretize(const ContinuousModel& model, double dt) {
  require(std::isfinite(dt) && dt >= 0.0, "dt must be > 0, got " + std::to_string(dt));
  return expm(model.A, dt);
}

NoiseModel build_noise(double sigma_x2, double sigma_f2, std::optional<double> sigma_v2) {
  require(finite(sigma_x2) && sigma_x2 > 0.0, "sigma_x2 must be > 0");
  require(finite(sigma_f2) && sigma_f2 > 0.0, "sigma_f2 must be > 0");
  const double sv2 = sigma_v2.value_or(sigma_x2);
  require(finite(sv2) && sv2 >= 0.0, "sigma_v2 must be >= 0");
  NoiseModel n;
  n.Q = Vector3(sigma_x2, sv2, sigma_f2).asDiagonal();
  n.R = sigma_x2;
  return n;
}

KalmanModel make_model(const OscillatorParams& params, double dt, double sigma_x2,
                       double sigma_f2, std::optional<double> sigma_v2) {
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  const auto noise = build_noise(sigma_x2, sigma_f2, sigma_v2);
  KalmanModel m;
  m.phi = discretize(continuous_model(params), dt);
  m.Q = noise.Q;
  m.R = noise.R;
  m.dt = dt;
  m.validate();
  return m;
}

}  // namespace oscdecon
