#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oscdecon/deconvolve.hpp"
#include "oscdecon/error.hpp"
#include "oscdecon/response.hpp"
#include "oscdecon/spectral.hpp"
#include "oscdecon/statespace.hpp"
#include "oscdecon/synth.hpp"
#include "oscdecon/timeseries.hpp"

namespace oscdecon {

using json = nlohmann::json;

/// Provenance record written next to every result file.
struct StageSettle {
  std::size_t stage = 0;
  std::size_t samples = 0;
  double decay_rate = 0.0;

  bool operator==(const StageSettle&) const = default;
};

struct RunManifest {
  std::string tool = "oscdecon";
  std::string version = OSCDECON_VERSION;
  std::string command;
  std::string input_digest;  ///< "sha256:<hex>" of the canonical input CSV
  json config;               ///< echo of the configuration that produced the output
  std::vector<StageSettle> settle;
  json metadata = json::object();

  bool operator==(const RunManifest&) const = default;
};

void to_json(json& j, const OscillatorParams& p);
void from_json(const json& j, OscillatorParams& p);
void to_json(json& j, const ComplexFrequency& w);
void from_json(const json& j, ComplexFrequency& w);
void to_json(json& j, const FilterStageConfig& s);
void from_json(const json& j, FilterStageConfig& s);
void to_json(json& j, const FilterChainConfig& c);
void from_json(const json& j, FilterChainConfig& c);
void to_json(json& j, const Pulse& p);
void from_json(const json& j, Pulse& p);
void to_json(json& j, const ForceProfile& p);
void from_json(const json& j, ForceProfile& p);
void to_json(json& j, const Transient& t);
void from_json(const json& j, Transient& t);
void to_json(json& j, const SimConfig& c);
void from_json(const json& j, SimConfig& c);
void to_json(json& j, const TimeSeries& s);
void from_json(const json& j, TimeSeries& s);
void to_json(json& j, const Spectrum& s);
void to_json(json& j, const SpectralPeak& p);
void to_json(json& j, const ResponsePoint& p);
void to_json(json& j, const StageSettle& s);
void from_json(const json& j, StageSettle& s);
void to_json(json& j, const RunManifest& m);
void from_json(const json& j, RunManifest& m);

/// Parses JSON text; malformed documents and schema mismatches surface as
/// ParseError / InvalidArgument rather than nlohmann exceptions.
json parse_json(const std::string& text);

template <typename T>
T decode(const json& j) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid configuration: ") + e.what());
  }
}

/// Stable text form used for every JSON file and HTTP body.
std::string canonical_dump(const json& j);

/// Manifest for a cascade run over `input`.
RunManifest make_filter_manifest(const TimeSeries& input, const FilterChainConfig& chain,
                                 const CascadeResult& result);

/// Body shared by `filter` output and POST /api/filter.
json filter_result_json(const CascadeResult& result, const RunManifest& manifest);

}  // namespace oscdecon
