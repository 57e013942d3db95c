#include "oscdecon/response.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oscdecon/deconvolve.hpp"
#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

constexpr double kMaxDriveSamples = 5e7;

struct Fit {
  double gain;
  double phase_deg;
};

// Least squares of y ~ c_s sin + c_c cos + c_0 over the tail window.
Fit fit_sinusoid(const std::vector<double>& y, std::size_t first, double omega_dt, double amplitude) {
  Eigen::Matrix3d AtA = Eigen::Matrix3d::Zero();
  Eigen::Vector3d Aty = Eigen::Vector3d::Zero();
  for (std::size_t n = first; n < y.size(); ++n) {
    const double ph = omega_dt * static_cast<double>(n);
    const Eigen::Vector3d row(std::sin(ph), std::cos(ph), 1.0);
    AtA += row * row.transpose();
    Aty += row * y[n];
  }
  const Eigen::Vector3d c = AtA.ldlt().solve(Aty);
  return {std::hypot(c[0], c[1]) / amplitude, std::atan2(c[1], c[0]) * 180.0 / std::numbers::pi};
}

}  // namespace

std::vector<ResponsePoint> measure_response(const SignalSystem& system, double dt,
                                            const std::vector<double>& freqs, std::size_t cycles,
                                            double settle_seconds, double amplitude) {
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  require(cycles >= 10, "cycles must be >= 10");
  require(std::isfinite(amplitude) && amplitude > 0.0, "drive amplitude must be > 0");
  require(settle_seconds >= 0.0, "settle time must be >= 0");
  const double nyquist = 0.5 / dt;

  std::vector<ResponsePoint> out;
  out.reserve(freqs.size());
  for (double f : freqs) {
    require(std::isfinite(f) && f > 0.0, "response frequencies must be > 0");
    if (f >= nyquist) {
      throw Error(ErrorCode::NyquistViolation, "response frequency " + format_double(f) +
                                                   " Hz is not below Nyquist " + format_double(nyquist) +
                                                   " Hz");
    }
    const double period = 1.0 / f;
    const double settle = std::max(5.0 * period, settle_seconds);
    const double measure_samples = std::round(static_cast<double>(cycles) * period / dt);
    const double total = std::ceil(settle / dt) + measure_samples;
    if (total > kMaxDriveSamples) {
      throw Error(ErrorCode::InvalidArgument, "drive at " + format_double(f) + " Hz needs " +
                                                  format_double(total) + " samples (limit " +
                                                  format_double(kMaxDriveSamples) + ")");
    }

    const auto n_total = static_cast<std::size_t>(total);
    const double omega_dt = 2.0 * std::numbers::pi * f * dt;
    TimeSeries drive;
    drive.dt = dt;
    drive.values.resize(n_total);
    for (std::size_t n = 0; n < n_total; ++n) {
      drive.values[n] = amplitude * std::sin(omega_dt * static_cast<double>(n));
    }
    const TimeSeries response = system(drive);
    require(response.size() == n_total, "system changed the series length");

    const Fit fit = fit_sinusoid(response.values, n_total - static_cast<std::size_t>(measure_samples),
                                 omega_dt, amplitude);
    out.push_back({f, fit.gain, fit.phase_deg});
  }
  return out;
}

std::vector<ResponsePoint> frequency_response(const KalmanModel& model,
                                              const std::vector<double>& freqs, std::size_t cycles,
                                              double amplitude) {
  const SteadyState steady = steady_state(model);
  const double rate = closed_loop_decay_rate(model, steady.gain);
  require(rate > 0.0, "fixed-gain filter is not stable", ErrorCode::Unstable);
  const SignalSystem system = [&](const TimeSeries& in) {
    return extract_force(run_fixed(in, model, steady, FilterState{}));
  };
  return measure_response(system, model.dt, freqs, cycles, kSettleTimeConstants / rate, amplitude);
}

std::vector<double> default_grid(double dt, std::size_t points, double f_min) {
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  require(points >= 2, "grid needs at least two points");
  const double f_max = 0.9 * 0.5 / dt;
  require(f_min > 0.0 && f_min < f_max, "f_min must lie in (0, 0.9 Nyquist)");
  std::vector<double> grid(points);
  const double ratio = std::log(f_max / f_min);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = f_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  grid.back() = f_max;
  return grid;
}

}  // namespace oscdecon
