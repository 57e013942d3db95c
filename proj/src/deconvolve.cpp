#include "oscdecon/deconvolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oscdecon/error.hpp"

namespace oscdecon {

void FilterStageConfig::validate() const {
  omega.validate();
  require(std::isfinite(sigma_x2) && sigma_x2 > 0.0, "stage sigma_x2 must be > 0");
  require(std::isfinite(sigma_f2) && sigma_f2 > 0.0, "stage sigma_f2 must be > 0");
  require(std::isfinite(force_scale) && force_scale > 0.0, "stage force_scale must be > 0");
  if (sigma_v2) require(std::isfinite(*sigma_v2) && *sigma_v2 >= 0.0, "stage sigma_v2 must be >= 0");
}

void FilterChainConfig::validate() const {
  require(!stages.empty(), "filter chain needs at least one stage");
  require(std::isfinite(dt) && dt > 0.0, "chain dt must be > 0");
  for (const auto& s : stages) s.validate();
}

KalmanModel make_stage(const FilterStageConfig& cfg, double dt) {
  cfg.validate();
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  const double nyquist = 0.5 / dt;
  if (cfg.omega.freq_hz >= nyquist) {
    throw Error(ErrorCode::NyquistViolation, "stage frequency " + format_double(cfg.omega.freq_hz) +
                                                 " Hz is not below Nyquist " + format_double(nyquist) +
                                                 " Hz");
  }
  OscillatorParams params = from_complex_root(cfg.omega);
  params.force_scale = cfg.force_scale;
  return make_model(params, dt, cfg.sigma_x2, cfg.sigma_f2, cfg.sigma_v2);
}

TimeSeries extract_force(const FilterRunResult& result) {
  if (result.estimates.empty()) throw Error(ErrorCode::EmptyInput, "filter result is empty");
  TimeSeries out;
  out.dt = result.dt;
  out.t0 = result.t0;
  out.units = result.units;
  out.values.reserve(result.size());
  for (const auto& s : result.estimates) out.values.push_back(s[2]);
  return out;
}

std::size_t settle_samples(double decay_rate, double dt, std::size_t length) {
  if (!(decay_rate > 0.0) || !std::isfinite(decay_rate)) {
    return std::isinf(decay_rate) ? 0 : length;
  }
  const double n = std::ceil(3.0 / (decay_rate * dt));
  return n >= static_cast<double>(length) ? length : static_cast<std::size_t>(n);
}

CascadeResult cascade_detailed(const TimeSeries& series, const FilterChainConfig& chain,
                               StageInit init) {
  chain.validate();
  series.validate();
  if (std::abs(series.dt - chain.dt) > 1e-9 * chain.dt) {
    throw Error(ErrorCode::DtMismatch, "series dt " + format_double(series.dt) +
                                           " does not match chain dt " + format_double(chain.dt));
  }
  if (chain.post_smooth > series.size()) {
    throw Error(ErrorCode::InvalidArgument, "post_smooth window exceeds series length");
  }

  CascadeResult out;
  TimeSeries current = series;
  for (const auto& stage_cfg : chain.stages) {
    StageReport rep;
    rep.model = make_stage(stage_cfg, chain.dt);
    rep.steady = steady_state(rep.model);
    rep.decay_rate = closed_loop_decay_rate(rep.model, rep.steady.gain);
    rep.settle_samples = settle_samples(rep.decay_rate, chain.dt, current.size());

    std::optional<FilterState> start;
    if (init == StageInit::Zero) start = FilterState{};
    current = extract_force(run_fixed(current, rep.model, rep.steady, start));
    out.stages.push_back(std::move(rep));
  }
  if (chain.post_smooth > 0) current = moving_average(current, chain.post_smooth);
  out.force = std::move(current);
  return out;
}

TimeSeries cascade(const TimeSeries& series, const FilterChainConfig& chain, StageInit init) {
  return cascade_detailed(series, chain, init).force;
}

TimeSeries moving_average(const TimeSeries& series, std::size_t window) {
  series.validate();
  if (window < 1 || window > series.size()) {
    throw Error(ErrorCode::InvalidArgument, "moving-average window " + std::to_string(window) +
                                                " outside [1, " + std::to_string(series.size()) + "]");
  }
  std::vector<double> out(series.size());
  long double sum = 0.0L;
  for (std::size_t n = 0; n < series.size(); ++n) {
    sum += series.values[n];
    if (n >= window) sum -= series.values[n - window];
    const std::size_t count = std::min(n + 1, window);
    out[n] = static_cast<double>(sum / static_cast<long double>(count));
  }
  return with_values(series, std::move(out));
}

FilterChainConfig chain_from_peaks(const std::vector<SpectralPeak>& peaks, double dt,
                                   double sigma_x2, double sigma_f2) {
  std::vector<SpectralPeak> ordered = peaks;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) { return a.power > b.power; });
  FilterChainConfig chain;
  chain.dt = dt;
  for (const auto& p : ordered) {
    FilterStageConfig s;
    s.omega = {p.freq_hz, p.damping_rate.value_or(0.0)};
    s.sigma_x2 = sigma_x2;
    s.sigma_f2 = sigma_f2;
    chain.stages.push_back(s);
  }
  return chain;
}

}  // namespace oscdecon
