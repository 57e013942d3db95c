#include "oscdecon/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// |DFT|^2 of a real sequence for bins 0 .. n/2.
std::vector<double> power_r2c(std::vector<double> input) {
  const int n = static_cast<int>(input.size());
  const std::size_t bins = input.size() / 2 + 1;
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, input.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  return power;
}

void check_length(const TimeSeries& series) {
  series.validate();
  require(series.size() >= kMinSpectralLength,
          "spectral analysis needs at least " + std::to_string(kMinSpectralLength) + " samples, got " +
              std::to_string(series.size()));
}

std::vector<double> band_power(const std::vector<double>& p) {
  std::vector<double> band(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    band[k] = p[k] + (k > 0 ? p[k - 1] : 0.0) + (k + 1 < p.size() ? p[k + 1] : 0.0);
  }
  return band;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

bool is_local_max(const std::vector<double>& p, std::size_t k) {
  constexpr std::size_t reach = 3;
  const std::size_t lo = k >= reach ? k - reach : 0;
  const std::size_t hi = std::min(p.size() - 1, k + reach);
  for (std::size_t j = lo; j < k; ++j) {
    if (p[j] >= p[k]) return false;  // plateau: leftmost wins
  }
  for (std::size_t j = k + 1; j <= hi; ++j) {
    if (p[j] > p[k]) return false;
  }
  return true;
}

double refine(const Spectrum& s, std::size_t k) {
  if (k == 0 || k + 1 >= s.size()) return s.freqs_hz[k];
  const double l = s.power[k - 1], c = s.power[k], r = s.power[k + 1];
  if (!(l > 0.0 && c > 0.0 && r > 0.0)) return s.freqs_hz[k];
  const double ll = std::log(l), lc = std::log(c), lr = std::log(r);
  const double denom = ll - 2.0 * lc + lr;
  if (!(denom < 0.0)) return s.freqs_hz[k];
  const double delta = std::clamp(0.5 * (ll - lr) / denom, -0.5, 0.5);
  return s.freqs_hz[k] + delta * s.bin_width_hz;
}

/// Power (relative to its DC value) of a decaying exponential observed over
/// [0, T] with a rectangular window, at angular offset dw from its frequency.
double decayed_line_shape(double lambda, double T, double dw) {
  const double e = std::exp(-lambda * T);
  const auto value = [&](double w) {
    if (lambda == 0.0 && w == 0.0) return T * T;
    return (1.0 - 2.0 * e * std::cos(w * T) + e * e) / (lambda * lambda + w * w);
  };
  return value(dw) / value(0.0);
}

/// Full half-power width (Hz) of decayed_line_shape.
double half_power_width(double lambda, double T) {
  // Scan outward in small steps, then bisect the first crossing.
  const double step = 0.05 / T;
  double lo = 0.0;
  double hi = step;
  while (decayed_line_shape(lambda, T, hi) > 0.5) {
    lo = hi;
    hi += step + lambda * 0.05;
  }
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (decayed_line_shape(lambda, T, mid) > 0.5 ? lo : hi) = mid;
  }
  return 2.0 * (0.5 * (lo + hi)) / (2.0 * std::numbers::pi);
}

}  // namespace

Spectrum periodogram(const TimeSeries& series) {
  check_length(series);
  const std::size_t n = series.size();

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  }
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  const double w2sum = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

  // Remove the window-weighted mean so the tapered signal sums to zero.
  const double weighted_mean =
      std::inner_product(w.begin(), w.end(), series.values.begin(), 0.0) / wsum;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = w[i] * (series.values[i] - weighted_mean);

  // An exactly constant series has no spectrum; without this the weighted
  // mean's rounding error would leave a spurious noise floor to pick peaks from.
  const bool constant = std::all_of(series.values.begin(), series.values.end(),
                                    [&](double v) { return v == series.values.front(); });
  std::vector<double> raw = constant ? std::vector<double>(n / 2 + 1, 0.0) : power_r2c(std::move(y));
  Spectrum s;
  const std::size_t half = n / 2;
  s.bin_width_hz = 1.0 / (static_cast<double>(n) * series.dt);
  s.freqs_hz.reserve(half);
  s.power.reserve(half);
  for (std::size_t k = 1; k <= half; ++k) {
    const bool nyquist = (n % 2 == 0) && k == half;
    s.freqs_hz.push_back(static_cast<double>(k) * s.bin_width_hz);
    s.power.push_back((nyquist ? 1.0 : 2.0) * raw[k] / w2sum);
  }
  return s;
}

std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, std::size_t max_count) {
  std::vector<SpectralPeak> peaks;
  if (spectrum.size() < 3 || max_count == 0) return peaks;

  const std::vector<double> band = band_power(spectrum.power);
  const double floor = kPeakSignificance * median(band);
  const double total = std::accumulate(spectrum.power.begin(), spectrum.power.end(), 0.0);
  if (!(total > 0.0)) return peaks;

  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k + 1 < spectrum.size(); ++k) {
    if (is_local_max(spectrum.power, k) && band[k] >= floor && band[k] > 0.0) idx.push_back(k);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return spectrum.power[a] > spectrum.power[b];
  });
  if (idx.size() > max_count) idx.resize(max_count);
  for (std::size_t k : idx) peaks.push_back({refine(spectrum, k), spectrum.power[k], std::nullopt});
  return peaks;
}

SpectralPeak dominant_frequency(const TimeSeries& series) {
  const Spectrum s = periodogram(series);
  const auto peaks = find_peaks(s, 1);
  if (peaks.empty()) {
    throw Error(ErrorCode::NoPeak, "no dominant peak: spectrum is flat (max band power below " +
                                       format_double(kPeakSignificance) + "x median)");
  }
  return peaks.front();
}

std::optional<double> estimate_damping(const TimeSeries& series, double freq_hz) {
  check_length(series);
  const double nyquist = 0.5 / series.dt;
  require(freq_hz > 0.0 && freq_hz < nyquist, "frequency must lie in (0, Nyquist)");

  const Spectrum coarse = periodogram(series);
  bool resolved = false;
  for (const auto& p : find_peaks(coarse, coarse.size())) {
    if (std::abs(p.freq_hz - freq_hz) <= 2.0 * coarse.bin_width_hz) {
      resolved = true;
      break;
    }
  }
  if (!resolved) return std::nullopt;

  // Rectangular window keeps the decay envelope intact; zero padding gives a
  // fine grid for locating the -3 dB crossings.
  const std::size_t n = series.size();
  const std::size_t padded = 8 * n;
  const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) /
                      static_cast<double>(n);
  std::vector<double> y(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) y[i] = series.values[i] - mean;
  const std::vector<double> p = power_r2c(std::move(y));
  const double df = 1.0 / (static_cast<double>(padded) * series.dt);

  const double search = coarse.bin_width_hz;
  const auto lo_bin = static_cast<std::size_t>(std::max(1.0, std::floor((freq_hz - search) / df)));
  const auto hi_bin = std::min(p.size() - 1, static_cast<std::size_t>(std::ceil((freq_hz + search) / df)));
  std::size_t m = lo_bin;
  for (std::size_t k = lo_bin; k <= hi_bin; ++k) {
    if (p[k] > p[m]) m = k;
  }
  const double half = 0.5 * p[m];
  if (!(half > 0.0)) return std::nullopt;

  std::size_t l = m;
  while (l > 0 && p[l] > half) --l;
  std::size_t r = m;
  while (r + 1 < p.size() && p[r] > half) ++r;
  if (p[l] > half || p[r] > half || l == 0) return std::nullopt;

  const auto crossing = [&](std::size_t outside, std::size_t inside) {
    const double t = (half - p[outside]) / (p[inside] - p[outside]);
    return (static_cast<double>(outside) + t * (static_cast<double>(inside) - static_cast<double>(outside))) * df;
  };
  const double width = crossing(r, r - 1) - crossing(l, l + 1);

  const double T = static_cast<double>(n) * series.dt;
  if (width <= half_power_width(0.0, T)) return 0.0;

  // half_power_width grows with lambda; its large-lambda limit is lambda / pi.
  double lo = 0.0;
  double hi = std::max(1.0 / T, std::numbers::pi * width);
  while (half_power_width(hi, T) < width) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (half_power_width(mid, T) < width ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<SpectralPeak> top_peaks(const TimeSeries& series, std::size_t max_count) {
  auto peaks = find_peaks(periodogram(series), max_count);
  for (auto& p : peaks) p.damping_rate = estimate_damping(series, p.freq_hz);
  return peaks;
}

Spectrum decimate(const Spectrum& spectrum, std::size_t max_points) {
  require(max_points > 0, "max_points must be > 0");
  if (spectrum.size() <= max_points) return spectrum;
  const std::size_t group = (spectrum.size() + max_points - 1) / max_points;
  Spectrum out;
  out.bin_width_hz = spectrum.bin_width_hz * static_cast<double>(group);
  for (std::size_t start = 0; start < spectrum.size(); start += group) {
    const std::size_t end = std::min(spectrum.size(), start + group);
    std::size_t best = start;
    for (std::size_t k = start; k < end; ++k) {
      if (spectrum.power[k] > spectrum.power[best]) best = k;
    }
    out.freqs_hz.push_back(spectrum.freqs_hz[best]);
    out.power.push_back(spectrum.power[best]);
  }
  return out;
}

}  // namespace oscdecon
