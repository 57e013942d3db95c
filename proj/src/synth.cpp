#include "oscdecon/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

std::size_t snap(double t, double dt) {
  if (t <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
}

bool in_pulse(std::size_t n, double t0, double t1, double dt) {
  return n >= snap(t0, dt) && n < snap(t1, dt);
}

}  // namespace

void ForceProfile::validate() const {
  require(std::isfinite(t0) && std::isfinite(t1) && std::isfinite(amplitude),
          "force profile fields must be finite");
  if (kind == Kind::Pulse) require(t1 > t0, "pulse needs t1 > t0");
  if (kind == Kind::MultiPulse) {
    require(!pulses.empty(), "multi-pulse profile needs at least one pulse");
    for (const auto& p : pulses) {
      require(std::isfinite(p.t0) && std::isfinite(p.t1) && std::isfinite(p.amplitude),
              "pulse fields must be finite");
      require(p.t1 > p.t0, "pulse needs t1 > t0");
    }
  }
}

double ForceProfile::at_sample(std::size_t n, double dt) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Pulse: return in_pulse(n, t0, t1, dt) ? amplitude : 0.0;
    case Kind::Step: return n >= snap(t0, dt) ? amplitude : 0.0;
    case Kind::MultiPulse: {
      double f = 0.0;
      for (const auto& p : pulses) {
        if (in_pulse(n, p.t0, p.t1, dt)) f += p.amplitude;
      }
      return f;
    }
  }
  return 0.0;
}

void SimConfig::validate() const {
  params.validate();
  profile.validate();
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  require(std::isfinite(duration) && duration >= 10.0 * dt, "duration must be >= 10 dt");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(std::isfinite(x0) && std::isfinite(v0), "initial state must be finite");
  require(substeps >= 1, "substeps must be >= 1");
  for (const auto& t : transients) {
    require(std::isfinite(t.freq_hz) && t.freq_hz > 0.0, "transient freq_hz must be > 0");
    require(std::isfinite(t.amplitude), "transient amplitude must be finite");
    require(std::isfinite(t.damping_rate) && t.damping_rate >= 0.0, "transient damping must be >= 0");
    require(std::isfinite(t.start_time), "transient start_time must be finite");
  }
  if (dt > 0.1 / std::sqrt(params.b)) {
    throw Error(ErrorCode::Unstable, "dt " + format_double(dt) + " exceeds 0.1/sqrt(b) = " +
                                         format_double(0.1 / std::sqrt(params.b)));
  }
}

std::size_t SimConfig::samples() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double scale = 0x1.0p-53;
  const double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * scale;
  const double u2 = (static_cast<double>(engine_() >> 11) + 0.5) * scale;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

SimResult simulate(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.samples();
  const double a = cfg.params.a;
  const double b = cfg.params.b;
  const double gain = b * cfg.params.force_scale;
  const double h = cfg.dt / cfg.substeps;

  SimResult out;
  for (TimeSeries* ts : {&out.measured, &out.truth_force, &out.position, &out.velocity}) {
    ts->dt = cfg.dt;
    ts->t0 = 0.0;
    ts->units = cfg.units;
    ts->values.resize(n);
  }

  double x = cfg.x0;
  double v = cfg.v0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = cfg.profile.at_sample(k, cfg.dt);
    out.position.values[k] = x;
    out.velocity.values[k] = v;
    out.truth_force.values[k] = f;

    const double drive = gain * f;
    const auto acc = [&](double xx, double vv) { return -b * xx - a * vv + drive; };
    for (int s = 0; s < cfg.substeps; ++s) {
      const double k1x = v, k1v = acc(x, v);
      const double k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
      const double k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
      const double k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
      x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
  }

  GaussianSource noise(cfg.seed);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    double value = out.position.values[k];
    for (const auto& tr : cfg.transients) {
      if (t < tr.start_time) continue;
      const double tau = t - tr.start_time;
      value += tr.amplitude * std::exp(-tr.damping_rate * tau) *
               std::sin(2.0 * std::numbers::pi * tr.freq_hz * tau);
    }
    if (cfg.noise_sigma > 0.0) value += cfg.noise_sigma * noise.next();
    out.measured.values[k] = value;
  }
  return out;
}

}  // namespace oscdecon
