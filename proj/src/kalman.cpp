#include "oscdecon/kalman.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

Matrix3 symmetrize(const Matrix3& P) { return 0.5 * (P + P.transpose()); }

void check_series(const TimeSeries& series, const KalmanModel& model) {
  if (series.empty()) throw Error(ErrorCode::EmptyInput, "cannot filter an empty series");
  series.validate();
  model.validate();
  if (std::abs(series.dt - model.dt) > 1e-9 * model.dt) {
    throw Error(ErrorCode::DtMismatch, "series dt " + format_double(series.dt) +
                                           " does not match model dt " + format_double(model.dt));
  }
}

FilterRunResult empty_result(const TimeSeries& series, const KalmanModel& model, FilterMode mode) {
  FilterRunResult r;
  r.model = model;
  r.mode = mode;
  r.dt = series.dt;
  r.t0 = series.t0;
  r.units = series.units;
  r.estimates.reserve(series.size());
  return r;
}

}  // namespace

FilterState FilterRunResult::state(std::size_t n) const {
  const Matrix3& P = covariances.size() == 1 ? covariances.front() : covariances.at(n);
  return {estimates.at(n), P};
}

const GainMatrix& FilterRunResult::gain(std::size_t n) const {
  return gains.size() == 1 ? gains.front() : gains.at(n);
}

FilterState predict(const FilterState& state, const KalmanModel& model) {
  FilterState out;
  out.s = model.phi * state.s;
  out.P = symmetrize(model.phi * state.P * model.phi.transpose() + model.Q);
  return out;
}

UpdateResult update(const FilterState& state, double z, const KalmanModel& model) {
  require(std::isfinite(z), "measurement must be finite");
  const Vector3 PHt = state.P * model.H.transpose();
  const double S = model.H.dot(PHt) + model.R;
  const Vector3 K = PHt / S;
  const double innovation = z - model.H.dot(state.s);

  const Matrix3 IKH = Matrix3::Identity() - K * model.H;
  UpdateResult r;
  r.state.s = state.s + K * innovation;
  r.state.P = symmetrize(IKH * state.P * IKH.transpose() + (K * model.R) * K.transpose());
  r.gain.K = K;
  return r;
}

Matrix3 default_covariance(const KalmanModel& model) {
  return Vector3(model.R, 1e3 * model.R, 1e3 * model.Q(2, 2)).asDiagonal();
}

double pseudostatic_force_ratio(const KalmanModel& model) {
  // Row 0 of (phi - I) s = 0 with s = (1, 0, f).
  const double coupling = model.phi(0, 2);
  require(coupling != 0.0, "model has no force coupling");
  return (1.0 - model.phi(0, 0)) / coupling;
}

FilterState default_init(double z0, const KalmanModel& model) {
  FilterState st;
  st.s = Vector3(z0, 0.0, z0 * pseudostatic_force_ratio(model));
  st.P = default_covariance(model);
  return st;
}

SteadyState steady_state(const KalmanModel& model, const SteadyStateOptions& opts) {
  model.validate();
  require(opts.tol > 0.0, "tolerance must be > 0");
  require(opts.max_iter > 0, "max_iter must be > 0");

  Matrix3 P = opts.P0.value_or(default_covariance(model));
  Vector3 K_prev = Vector3::Constant(std::numeric_limits<double>::infinity());
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    FilterState prior = predict(FilterState{Vector3::Zero(), P}, model);
    const UpdateResult post = update(prior, 0.0, model);
    const Vector3& K = post.gain.K;
    residual = (K - K_prev).norm();
    P = post.state.P;
    if (residual <= opts.tol * K.norm()) {
      return {post.gain, prior.P, P, it};
    }
    K_prev = K;
  }
  throw NonConvergence("steady-state gain did not converge in " + std::to_string(opts.max_iter) +
                           " iterations (last residual " + format_double(residual) + ")",
                       opts.max_iter, residual);
}

GainMatrix steady_state_gain(const KalmanModel& model, double tol, std::size_t max_iter) {
  return steady_state(model, {tol, max_iter, std::nullopt}).gain;
}

double closed_loop_decay_rate(const KalmanModel& model, const GainMatrix& gain) {
  const Matrix3 closed = (Matrix3::Identity() - gain.K * model.H) * model.phi;
  const double rho = Eigen::EigenSolver<Matrix3>(closed, false).eigenvalues().cwiseAbs().maxCoeff();
  if (!(rho > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log(rho) / model.dt;
}

FilterRunResult run_fixed(const TimeSeries& series, const KalmanModel& model,
                          const SteadyState& steady, std::optional<FilterState> init) {
  check_series(series, model);
  FilterRunResult r = empty_result(series, model, FilterMode::FixedGain);
  r.gains.push_back(steady.gain);
  r.covariances.push_back(steady.P_post);

  const Vector3 K = steady.gain.K;
  const Matrix3& phi = model.phi;
  Vector3 s = init ? init->s : default_init(series.values.front(), model).s;
  for (std::size_t n = 0; n < series.size(); ++n) {
    if (n > 0) s = phi * s;
    s += K * (series.values[n] - s[0]);
    r.estimates.push_back(s);
  }
  return r;
}

FilterRunResult run(const TimeSeries& series, const KalmanModel& model, FilterMode mode,
                    std::optional<FilterState> init) {
  check_series(series, model);
  if (mode == FilterMode::FixedGain) return run_fixed(series, model, steady_state(model), init);

  FilterRunResult r = empty_result(series, model, mode);
  r.covariances.reserve(series.size());
  r.gains.reserve(series.size());
  FilterState st = init.value_or(default_init(series.values.front(), model));
  for (std::size_t n = 0; n < series.size(); ++n) {
    if (n > 0) st = predict(st, model);
    UpdateResult u = update(st, series.values[n], model);
    st = u.state;
    r.estimates.push_back(st.s);
    r.covariances.push_back(st.P);
    r.gains.push_back(u.gain);
  }
  return r;
}

}  // namespace oscdecon
