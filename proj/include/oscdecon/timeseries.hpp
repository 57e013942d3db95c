#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace oscdecon {

/// Uniformly sampled scalar signal; sample n sits at t0 + n * dt.
struct TimeSeries {
  double dt = 1.0;
  double t0 = 0.0;
  std::vector<double> values;
  std::string units;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double time(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }

  /// Throws EmptyInput for zero samples, InvalidArgument for dt <= 0 or
  /// non-finite samples.
  void validate() const;
};

/// Same dt/t0/units, new samples.
TimeSeries with_values(const TimeSeries& like, std::vector<double> values);

/// Accepts either `time,value` rows (dt taken from the first interval unless a
/// `# dt=` header is present) or one value per line with a `# dt=` header.
/// Header keys: dt, t0, units. Spacing must satisfy |dt_i - dt| <= 1e-6 dt.
TimeSeries read_csv(std::istream& in);
TimeSeries read_csv(std::string_view text);
TimeSeries read_csv_file(const std::filesystem::path& path);

/// Canonical form: metadata header, `time,value` column header, shortest
/// round-trip decimals.
void write_csv(const TimeSeries& series, std::ostream& out);
std::string to_csv(const TimeSeries& series);
void write_csv_file(const TimeSeries& series, const std::filesystem::path& path);

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Digest of the canonical CSV form; independent of how the input was spelled.
std::string series_digest(const TimeSeries& series);

std::string read_file(const std::filesystem::path& path);

}  // namespace oscdecon
