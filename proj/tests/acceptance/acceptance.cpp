// Acceptance suite: one PASS/FAIL line per primary criterion. Exits non-zero
// if any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "oscdecon/deconvolve.hpp"
#include "oscdecon/error.hpp"
#include "oscdecon/kalman.hpp"
#include "oscdecon/response.hpp"
#include "oscdecon/spectral.hpp"
#include "oscdecon/statespace.hpp"
#include "oscdecon/synth.hpp"
#include "oscdecon/timeseries.hpp"

using namespace oscdecon;

namespace {

// Criterion 1: tightened from 15% / 500 to the observed worst case over 200
// noise seeds (0.06% / 0.32) with roughly 15x headroom.
constexpr double kPlateauTolerance = 0.01;
constexpr double kPostPulseLimit = 5.0;
constexpr double kReplicaSeconds = 5.0;
// Criterion 3
constexpr double kNotchGainLimit = 0.05;
constexpr double kHighFreqGainFloor = 0.7;
constexpr double kNotchWindowHz = 1.0;
constexpr double kGridSeconds = 30.0;
// Criterion 4
constexpr double kToneAttenuationDb = 20.0;
constexpr double kStepTolerance = 0.10;
// Criterion 5
constexpr double kGainAgreement = 1e-6;
constexpr int kRandomModels = 100;
// Criterion 6
constexpr double kExpmTolerance = 1e-10;
constexpr double kSemigroupTolerance = 1e-9;
constexpr double kLinearityTolerance = 1e-9;
constexpr double kRootTolerance = 1e-12;
constexpr int kCovarianceSteps = 100'000;
// Criterion 7: the force channel amplifies broadband noise roughly as
// (f / f_stage)^2, so the synthetic is kept low-noise and sigma_f2 moderate.
constexpr double kDetectionNoise = 1e-3;
constexpr double kDetectionSigmaF2 = 1e2;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Report {
 public:
  void add(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!details_.empty()) details_ += "; ";
    details_ += (ok ? "" : "!") + what;
  }
  Outcome outcome() const { return {pass_, details_}; }

 private:
  bool pass_ = true;
  std::string details_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean_over(const TimeSeries& ts, double t0, double t1) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts.time(i);
    if (t >= t0 && t < t1) {
      acc += ts.values[i];
      ++n;
    }
  }
  return acc / static_cast<double>(n);
}

double variance_over(const TimeSeries& ts, double t0, double t1) {
  const double m = mean_over(ts, t0, t1);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts.time(i);
    if (t >= t0 && t < t1) {
      acc += (ts.values[i] - m) * (ts.values[i] - m);
      ++n;
    }
  }
  return acc / static_cast<double>(n);
}

TimeSeries tail_from(const TimeSeries& ts, std::size_t first) {
  TimeSeries out = ts;
  out.values.erase(out.values.begin(), out.values.begin() + static_cast<std::ptrdiff_t>(first));
  out.t0 = ts.time(first);
  return out;
}

double band_peak(const Spectrum& s, double freq_hz, double half_width_hz) {
  double peak = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::abs(s.freqs_hz[k] - freq_hz) <= half_width_hz) peak = std::max(peak, s.power[k]);
  }
  return peak;
}

// ---------------------------------------------------------------------------

SimConfig replica_config() {
  SimConfig cfg;
  cfg.params = {0.1, 1000.0, 1.0};
  cfg.profile.kind = ForceProfile::Kind::Pulse;
  cfg.profile.t0 = 1.0;
  cfg.profile.t1 = 1.1;
  cfg.profile.amplitude = 1e4;
  cfg.dt = 0.001;
  cfg.duration = 3.0;
  cfg.noise_sigma = 0.1;
  cfg.seed = 42;
  return cfg;
}

const std::vector<double> kReplicaSigmas{1e3, 1e4, 1e5, 1e6};

std::vector<TimeSeries> replica_outputs(double* elapsed) {
  const auto start = std::chrono::steady_clock::now();
  const SimConfig cfg = replica_config();
  const SimResult sim = simulate(cfg);
  std::vector<TimeSeries> out;
  for (double sf2 : kReplicaSigmas) {
    FilterChainConfig chain;
    chain.dt = cfg.dt;
    FilterStageConfig stage;
    stage.omega = characteristic_ring(cfg.params);
    stage.sigma_x2 = cfg.noise_sigma * cfg.noise_sigma;
    stage.sigma_f2 = sf2;
    chain.stages = {stage};
    out.push_back(cascade(sim.measured, chain));
  }
  if (elapsed) *elapsed = seconds_since(start);
  return out;
}

Outcome criterion_1() {
  double elapsed = 0.0;
  const auto outputs = replica_outputs(&elapsed);
  const TimeSeries& f = outputs[2];  // sigma_f2 = 1e5
  const double plateau = mean_over(f, 1.02, 1.08);
  const double post = mean_over(f, 1.5, 2.5);
  Report r;
  r.add(std::abs(plateau - 1e4) <= kPlateauTolerance * 1e4, "plateau mean " + fmt(plateau, 6) + " (target 1e4 +/-1%)");
  r.add(std::abs(post) < kPostPulseLimit, "post-pulse mean " + fmt(post) + " (|.| < 5)");
  r.add(elapsed < kReplicaSeconds, "runtime " + fmt(elapsed, 3) + " s (< 5 s)");
  return r.outcome();
}

Outcome criterion_2() {
  const auto outputs = replica_outputs(nullptr);
  Report r;
  std::string values;
  double previous = -INFINITY;
  bool increasing = true;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double v = variance_over(outputs[i], 2.0, 2.8);
    values += (i ? " < " : "") + fmt(v);
    increasing = increasing && v > previous;
    previous = v;
  }
  r.add(increasing, "variance over [2.0,2.8] for sigma_f2 1e3..1e6: " + values);
  return r.outcome();
}

Outcome criterion_3() {
  const double dt = 0.001;
  const double sigma_x2 = 1e-3;
  const auto notch = [&](double sf2) {
    FilterStageConfig cfg;
    cfg.omega = {50.0, 1.0};
    cfg.sigma_x2 = sigma_x2;
    cfg.sigma_f2 = sf2;
    return make_stage(cfg, dt);
  };
  const KalmanModel narrow = notch(sigma_x2 * 1e2);
  const KalmanModel wide = notch(sigma_x2 * 1e8);
  Report r;

  const auto start = std::chrono::steady_clock::now();
  const auto grid = default_grid(dt);
  const auto coarse = frequency_response(narrow, grid);
  const double elapsed = seconds_since(start);

  // Locate the minimum on a fine scan around the design frequency and confirm
  // it is interior (a local minimum).
  for (const auto& [label, model] : {std::pair{"small", narrow}, std::pair{"large", wide}}) {
    std::vector<double> fine;
    for (double f = 40.0; f <= 60.0 + 1e-9; f += 0.05) fine.push_back(f);
    const auto pts = frequency_response(model, fine);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].gain < pts[best].gain) best = i;
    }
    const bool interior = best > 0 && best + 1 < pts.size();
    r.add(interior && std::abs(pts[best].freq_hz - 50.0) <= kNotchWindowHz,
          std::string(label) + " sigma_f2 local min at " + fmt(pts[best].freq_hz, 5) + " Hz");
  }
  std::size_t coarse_best = 0;
  for (std::size_t i = 1; i < coarse.size(); ++i) {
    if (coarse[i].gain < coarse[coarse_best].gain) coarse_best = i;
  }
  const double spacing = grid[coarse_best + 1] - grid[coarse_best];
  r.add(std::abs(coarse[coarse_best].freq_hz - 50.0) <= std::max(kNotchWindowHz, spacing),
        "200-point grid min at " + fmt(coarse[coarse_best].freq_hz, 5) + " Hz");

  const double g50 = frequency_response(narrow, {50.0}).front().gain;
  const double g100 = frequency_response(wide, {100.0}).front().gain;
  r.add(g50 < kNotchGainLimit, "gain(50 Hz) " + fmt(g50) + " at sigma_f2=sigma_x2*1e2 (< 0.05)");
  r.add(g100 >= kHighFreqGainFloor, "gain(100 Hz) " + fmt(g100) + " at sigma_f2=sigma_x2*1e8 (>= 0.7)");
  r.add(elapsed < kGridSeconds, "200-point grid " + fmt(elapsed, 3) + " s (< 30 s)");
  return r.outcome();
}

Outcome criterion_4() {
  const double step = 1000.0;
  SimConfig cfg;
  // A stiff, well-damped sensor: the step reaches the measurement without ringing.
  cfg.params = {300.0, 1e4, 1.0};
  cfg.profile.kind = ForceProfile::Kind::Step;
  cfg.profile.t0 = 0.5;
  cfg.profile.amplitude = step;
  cfg.dt = 0.001;
  cfg.duration = 4.0;
  cfg.noise_sigma = 0.1;
  cfg.seed = 7;
  cfg.transients = {{12.2, 10.0 * step, 2.0, 1.0}, {40.0, 10.0 * step, 2.0, 1.0}};
  const SimResult sim = simulate(cfg);

  FilterChainConfig chain;
  chain.dt = cfg.dt;
  for (double f : {40.0, 12.2}) {
    FilterStageConfig s;
    s.omega = {f, 2.0};
    s.sigma_x2 = 0.01;
    s.sigma_f2 = 1e5;
    chain.stages.push_back(s);
  }
  const CascadeResult result = cascade_detailed(sim.measured, chain);

  std::size_t settle = 0;
  for (const auto& st : result.stages) settle += st.settle_samples;
  const std::size_t first = std::max<std::size_t>(settle, 1000);  // tones begin at 1 s
  const Spectrum before = periodogram(tail_from(sim.measured, first));
  const Spectrum after = periodogram(tail_from(result.force, first));

  Report r;
  for (double f : {12.2, 40.0}) {
    const double db = 10.0 * std::log10(band_peak(before, f, 1.0) / band_peak(after, f, 1.0));
    r.add(db >= kToneAttenuationDb, fmt(f, 3) + " Hz attenuated " + fmt(db, 3) + " dB (>= 20)");
  }
  const double level = mean_over(result.force, 3.0, 4.0);
  r.add(std::abs(level - step) <= kStepTolerance * step, "step level " + fmt(level, 6) + " (1000 +/-10%)");
  return r.outcome();
}

Outcome criterion_5() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < kRandomModels; ++i) {
    const double dt = std::pow(10.0, -3.5 + u(rng));
    FilterStageConfig cfg;
    cfg.omega = {std::pow(10.0, u(rng) * std::log10(0.4 / dt)), std::pow(10.0, -1.0 + 2.0 * u(rng))};
    cfg.sigma_x2 = std::pow(10.0, -4.0 + 3.0 * u(rng));
    cfg.sigma_f2 = cfg.sigma_x2 * std::pow(10.0, 1.0 + 6.0 * u(rng));
    const KalmanModel m = make_stage(cfg, dt);
    const Vector3 Kss = steady_state_gain(m).K;

    FilterState st = default_init(0.0, m);
    Vector3 K = Vector3::Zero();
    for (int n = 0; n <= 10'000; ++n) {
      if (n > 0) st = predict(st, m);
      const auto up = update(st, 0.0, m);
      st = up.state;
      K = up.gain.K;
    }
    const double scale = std::max(1.0, Kss.cwiseAbs().maxCoeff());
    worst = std::max(worst, (K - Kss).cwiseAbs().maxCoeff() / scale);
  }
  Report r;
  r.add(worst <= kGainAgreement, "worst |K_tv(1e4) - K_ss|_inf / max(1,|K_ss|_inf) over 100 models: " + fmt(worst, 3));
  return r.outcome();
}

Outcome criterion_6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  Report r;

  double expm_err = 0.0, semigroup_err = 0.0, root_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ComplexFrequency w{std::pow(10.0, -1.0 + 3.0 * u(rng)), std::pow(10.0, -2.0 + 3.0 * u(rng)) * u(rng)};
    const auto params = from_complex_root(w);
    const ContinuousModel cm = continuous_model(params);
    const double t = std::pow(10.0, -4.0 + 3.0 * u(rng));
    expm_err = std::max(expm_err, oracle::max_rel_entry_diff(expm(cm.A, t), oracle::expm_series(cm.A, t)));
    const double t2 = std::pow(10.0, -4.0 + 3.0 * u(rng));
    semigroup_err = std::max(semigroup_err, oracle::max_rel_entry_diff(expm(cm.A, t) * expm(cm.A, t2), expm(cm.A, t + t2)));
    const auto back = characteristic_ring(params);
    root_err = std::max({root_err, std::abs(back.freq_hz - w.freq_hz) / w.freq_hz,
                         std::abs(back.damping_rate - w.damping_rate) / std::max(w.damping_rate, 1e-300)});
  }
  r.add(expm_err <= kExpmTolerance, "expm vs series " + fmt(expm_err, 3));
  r.add(semigroup_err <= kSemigroupTolerance, "semigroup " + fmt(semigroup_err, 3));
  r.add(root_err <= kRootTolerance, "root round-trip " + fmt(root_err, 3));

  // Fixed-gain linearity through a three-stage chain.
  FilterChainConfig chain;
  chain.dt = 0.001;
  for (double f : {12.2, 40.0, 85.7}) {
    FilterStageConfig s;
    s.omega = {f, 2.0};
    s.sigma_f2 = 1e4;
    chain.stages.push_back(s);
  }
  TimeSeries a, b, mix;
  a.dt = b.dt = mix.dt = 0.001;
  for (int i = 0; i < 5000; ++i) {
    a.values.push_back(g(rng));
    b.values.push_back(10.0 * g(rng) + 1.0);
    mix.values.push_back(1.5 * a.values.back() - 0.25 * b.values.back());
  }
  const auto ca = cascade(a, chain, StageInit::Zero), cb = cascade(b, chain, StageInit::Zero),
             cmix = cascade(mix, chain, StageInit::Zero);
  double lin_err = 0.0, lin_scale = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    lin_scale = std::max(lin_scale, std::abs(cmix.values[i]));
    lin_err = std::max(lin_err, std::abs(cmix.values[i] - (1.5 * ca.values[i] - 0.25 * cb.values[i])));
  }
  r.add(lin_err <= kLinearityTolerance * lin_scale, "linearity " + fmt(lin_err / lin_scale, 3));

  // Covariance stays symmetric positive semidefinite.
  const KalmanModel m = make_stage(chain.stages[1], 0.001);
  FilterState st = default_init(0.0, m);
  int bad = 0;
  for (int i = 0; i < kCovarianceSteps; ++i) {
    st = predict(st, m);
    st = update(st, g(rng), m).state;
    const double scale = st.P.cwiseAbs().maxCoeff();
    const bool symmetric = (st.P - st.P.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
    const bool psd = Eigen::SelfAdjointEigenSolver<Matrix3>(st.P).eigenvalues().minCoeff() >= -1e-9 * scale;
    if (!symmetric || !psd) ++bad;
  }
  r.add(bad == 0, "covariance PSD/symmetric over 1e5 steps, violations " + std::to_string(bad));

  // CSV round trip.
  TimeSeries ts;
  ts.dt = 0.001;
  ts.units = "N";
  std::uniform_int_distribution<std::uint64_t> bits;
  while (ts.values.size() < 10'000) {
    const double v = std::bit_cast<double>(bits(rng));
    if (std::isfinite(v)) ts.values.push_back(v);
  }
  const TimeSeries back = read_csv(to_csv(ts));
  r.add(back.values == ts.values && back.dt == ts.dt && back.units == ts.units, "CSV round-trip exact");
  return r.outcome();
}

Outcome criterion_7() {
  const double dt = 0.001;
  TimeSeries ts;
  ts.dt = dt;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, kDetectionNoise);
  for (int i = 0; i < 4000; ++i) {
    const double t = i * dt;
    ts.values.push_back(10.0 * std::exp(-2.0 * t) * std::sin(kTwoPi * 40.0 * t) +
                        1.0 * std::exp(-2.0 * t) * std::sin(kTwoPi * 12.2 * t) + g(rng));
  }
  const double bin = 1.0 / (static_cast<double>(ts.size()) * dt);
  Report r;
  const SpectralPeak first = dominant_frequency(ts);
  r.add(std::abs(first.freq_hz - 40.0) <= bin, "first dominant " + fmt(first.freq_hz, 5) + " Hz (40 +/- " + fmt(bin) + ")");

  FilterChainConfig chain;
  chain.dt = dt;
  FilterStageConfig stage;
  stage.omega = {first.freq_hz, estimate_damping(ts, first.freq_hz).value_or(0.0)};
  stage.sigma_x2 = 0.01;
  stage.sigma_f2 = kDetectionSigmaF2;
  chain.stages = {stage};
  const CascadeResult filtered = cascade_detailed(ts, chain);
  const TimeSeries settled = tail_from(filtered.force, filtered.stages.front().settle_samples);
  const double settled_bin = 1.0 / (static_cast<double>(settled.size()) * dt);
  const SpectralPeak second = dominant_frequency(settled);
  r.add(std::abs(second.freq_hz - 12.2) <= settled_bin,
        "after one stage " + fmt(second.freq_hz, 5) + " Hz (12.2 +/- " + fmt(settled_bin) + ")");
  return r.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"replica pulse recovery", criterion_1},
      {"noise monotone in sigma_f2", criterion_2},
      {"50 Hz notch response", criterion_3},
      {"cascade removal of 12.2 and 40 Hz", criterion_4},
      {"steady-state gain agreement", criterion_5},
      {"oracle and property suites", criterion_6},
      {"spectral detection 40 then 12.2 Hz", criterion_7},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
