#include "oscdecon/timeseries.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>

#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

double require_number(std::string_view s, std::size_t line, const char* what) {
  auto v = parse_number(s);
  if (!v) throw ParseError(std::string("invalid ") + what + " '" + std::string(trim(s)) + "'", line);
  if (!std::isfinite(*v)) throw ParseError(std::string("non-finite ") + what, line);
  return *v;
}

}  // namespace

void TimeSeries::validate() const {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "time series has no samples");
  require(std::isfinite(dt) && dt > 0.0, "sample interval dt must be > 0");
  require(std::isfinite(t0), "t0 must be finite");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]), "sample " + std::to_string(i) + " is not finite");
  }
}

TimeSeries with_values(const TimeSeries& like, std::vector<double> values) {
  TimeSeries out;
  out.dt = like.dt;
  out.t0 = like.t0;
  out.units = like.units;
  out.values = std::move(values);
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf.data(), ptr);
}

TimeSeries read_csv(std::istream& in) {
  std::optional<double> header_dt;
  std::optional<double> header_t0;
  std::string units;
  std::vector<double> times;
  std::vector<double> values;
  int columns = 0;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line = trim(line.substr(3));
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, eq));
      const auto val = trim(body.substr(eq + 1));
      if (key == "dt") {
        header_dt = require_number(val, lineno, "dt");
        if (*header_dt <= 0.0) throw ParseError("dt must be > 0", lineno);
      } else if (key == "t0") {
        header_t0 = require_number(val, lineno, "t0");
      } else if (key == "units") {
        units = std::string(val);
      }
      continue;
    }

    const auto comma = line.find(',');
    const int ncols = comma == std::string_view::npos ? 1 : 2;
    if (comma != std::string_view::npos && line.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("expected at most two columns", lineno);
    }
    // A non-numeric first data line is a column header.
    if (columns == 0 && !parse_number(ncols == 1 ? line : line.substr(0, comma))) {
      columns = ncols;
      continue;
    }
    if (columns == 0) columns = ncols;
    if (ncols != columns) throw ParseError("inconsistent column count", lineno);

    if (ncols == 1) {
      values.push_back(require_number(line, lineno, "value"));
    } else {
      times.push_back(require_number(line.substr(0, comma), lineno, "time"));
      values.push_back(require_number(line.substr(comma + 1), lineno, "value"));
    }
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "failed reading CSV input");
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "CSV contains no samples");

  TimeSeries ts;
  ts.units = units;
  ts.values = std::move(values);
  if (times.empty()) {
    if (!header_dt) throw ParseError("single-column CSV requires a '# dt=' header", lineno);
    ts.dt = *header_dt;
    ts.t0 = header_t0.value_or(0.0);
    return ts;
  }

  ts.t0 = times.front();
  if (header_dt) {
    ts.dt = *header_dt;
  } else if (times.size() >= 2) {
    ts.dt = times[1] - times[0];
  } else {
    throw ParseError("cannot infer dt from a single timestamp without a '# dt=' header", lineno);
  }
  if (!(ts.dt > 0.0)) throw Error(ErrorCode::NonUniformSampling, "timestamps are not increasing");

  double worst = 0.0;
  std::size_t worst_index = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dev = std::abs((times[i] - times[i - 1]) - ts.dt);
    if (dev > worst) {
      worst = dev;
      worst_index = i;
    }
  }
  if (worst > 1e-6 * ts.dt) {
    throw NonUniformSampling("sample spacing deviates by " + format_double(worst) + " s at index " +
                                 std::to_string(worst_index),
                             worst_index);
  }
  return ts;
}

TimeSeries read_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_csv(in);
}

TimeSeries read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_csv(in);
}

void write_csv(const TimeSeries& series, std::ostream& out) {
  series.validate();
  out << "# dt=" << format_double(series.dt) << '\n';
  out << "# t0=" << format_double(series.t0) << '\n';
  if (!series.units.empty()) out << "# units=" << series.units << '\n';
  out << "time,value\n";
  for (std::size_t n = 0; n < series.size(); ++n) {
    out << format_double(series.time(n)) << ',' << format_double(series.values[n]) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing CSV output");
}

std::string to_csv(const TimeSeries& series) {
  std::ostringstream out;
  write_csv(series, out);
  return out.str();
}

void write_csv_file(const TimeSeries& series, const std::filesystem::path& path) {
  const std::string text = to_csv(series);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string series_digest(const TimeSeries& series) { return "sha256:" + sha256_hex(to_csv(series)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oscdecon
