#include "oscdecon/json_io.hpp"

#include "oscdecon/error.hpp"

namespace oscdecon {

namespace {

const char* kind_name(ForceProfile::Kind k) {
  switch (k) {
    case ForceProfile::Kind::Zero: return "zero";
    case ForceProfile::Kind::Pulse: return "pulse";
    case ForceProfile::Kind::Step: return "step";
    case ForceProfile::Kind::MultiPulse: return "multi-pulse";
  }
  return "zero";
}

ForceProfile::Kind kind_from(const std::string& s) {
  if (s == "zero") return ForceProfile::Kind::Zero;
  if (s == "pulse") return ForceProfile::Kind::Pulse;
  if (s == "step") return ForceProfile::Kind::Step;
  if (s == "multi-pulse") return ForceProfile::Kind::MultiPulse;
  throw Error(ErrorCode::InvalidArgument, "unknown force profile kind '" + s + "'");
}

}  // namespace

void to_json(json& j, const OscillatorParams& p) {
  j = {{"a", p.a}, {"b", p.b}, {"force_scale", p.force_scale}};
}

void from_json(const json& j, OscillatorParams& p) {
  j.at("a").get_to(p.a);
  j.at("b").get_to(p.b);
  p.force_scale = j.value("force_scale", 1.0);
}

void to_json(json& j, const ComplexFrequency& w) {
  j = {{"freq_hz", w.freq_hz}, {"damping_rate", w.damping_rate}};
}

void from_json(const json& j, ComplexFrequency& w) {
  j.at("freq_hz").get_to(w.freq_hz);
  w.damping_rate = j.value("damping_rate", 0.0);
}

void to_json(json& j, const FilterStageConfig& s) {
  j = {{"omega", s.omega}, {"sigma_x2", s.sigma_x2}, {"sigma_f2", s.sigma_f2}};
  if (s.force_scale != 1.0) j["force_scale"] = s.force_scale;
  if (s.sigma_v2) j["sigma_v2"] = *s.sigma_v2;
}

void from_json(const json& j, FilterStageConfig& s) {
  j.at("omega").get_to(s.omega);
  j.at("sigma_x2").get_to(s.sigma_x2);
  j.at("sigma_f2").get_to(s.sigma_f2);
  s.force_scale = j.value("force_scale", 1.0);
  s.sigma_v2.reset();
  if (j.contains("sigma_v2")) s.sigma_v2 = j.at("sigma_v2").get<double>();
}

void to_json(json& j, const FilterChainConfig& c) {
  j = {{"stages", c.stages}, {"dt", c.dt}, {"post_smooth", c.post_smooth}};
}

void from_json(const json& j, FilterChainConfig& c) {
  j.at("stages").get_to(c.stages);
  j.at("dt").get_to(c.dt);
  c.post_smooth = j.value("post_smooth", std::size_t{0});
}

void to_json(json& j, const Pulse& p) { j = {{"t0", p.t0}, {"t1", p.t1}, {"amplitude", p.amplitude}}; }

void from_json(const json& j, Pulse& p) {
  j.at("t0").get_to(p.t0);
  j.at("t1").get_to(p.t1);
  j.at("amplitude").get_to(p.amplitude);
}

void to_json(json& j, const ForceProfile& p) {
  j = {{"kind", kind_name(p.kind)}, {"t0", p.t0}, {"t1", p.t1}, {"amplitude", p.amplitude}};
  if (p.kind == ForceProfile::Kind::MultiPulse) j["pulses"] = p.pulses;
}

void from_json(const json& j, ForceProfile& p) {
  p.kind = kind_from(j.at("kind").get<std::string>());
  p.t0 = j.value("t0", 0.0);
  p.t1 = j.value("t1", 0.0);
  p.amplitude = j.value("amplitude", 0.0);
  p.pulses = j.value("pulses", std::vector<Pulse>{});
}

void to_json(json& j, const Transient& t) {
  j = {{"freq_hz", t.freq_hz},
       {"amplitude", t.amplitude},
       {"damping_rate", t.damping_rate},
       {"start_time", t.start_time}};
}

void from_json(const json& j, Transient& t) {
  j.at("freq_hz").get_to(t.freq_hz);
  j.at("amplitude").get_to(t.amplitude);
  t.damping_rate = j.value("damping_rate", 0.0);
  t.start_time = j.value("start_time", 0.0);
}

void to_json(json& j, const SimConfig& c) {
  j = {{"params", c.params},     {"profile", c.profile},         {"dt", c.dt},
       {"duration", c.duration}, {"noise_sigma", c.noise_sigma}, {"seed", c.seed},
       {"transients", c.transients}, {"x0", c.x0},               {"v0", c.v0},
       {"units", c.units},       {"substeps", c.substeps}};
}

void from_json(const json& j, SimConfig& c) {
  j.at("params").get_to(c.params);
  c.profile = j.value("profile", ForceProfile{});
  j.at("dt").get_to(c.dt);
  c.duration = j.value("duration", 3.0);
  c.noise_sigma = j.value("noise_sigma", 0.0);
  c.seed = j.value("seed", std::uint64_t{0});
  c.transients = j.value("transients", std::vector<Transient>{});
  c.x0 = j.value("x0", 0.0);
  c.v0 = j.value("v0", 0.0);
  c.units = j.value("units", std::string{});
  c.substeps = j.value("substeps", 10);
}

void to_json(json& j, const TimeSeries& s) {
  j = {{"dt", s.dt}, {"t0", s.t0}, {"units", s.units}, {"values", s.values}};
}

void from_json(const json& j, TimeSeries& s) {
  j.at("dt").get_to(s.dt);
  s.t0 = j.value("t0", 0.0);
  s.units = j.value("units", std::string{});
  j.at("values").get_to(s.values);
}

void to_json(json& j, const Spectrum& s) {
  j = {{"freqs_hz", s.freqs_hz}, {"power", s.power}, {"bin_width_hz", s.bin_width_hz}};
}

void to_json(json& j, const SpectralPeak& p) {
  j = {{"freq_hz", p.freq_hz}, {"power", p.power}};
  j["damping_rate"] = p.damping_rate ? json(*p.damping_rate) : json(nullptr);
}

void to_json(json& j, const ResponsePoint& p) {
  j = {{"freq_hz", p.freq_hz}, {"gain", p.gain}};
  if (p.phase_deg) j["phase_deg"] = *p.phase_deg;
}

void to_json(json& j, const StageSettle& s) {
  j = {{"stage", s.stage}, {"samples", s.samples}, {"decay_rate", s.decay_rate}};
}

void from_json(const json& j, StageSettle& s) {
  j.at("stage").get_to(s.stage);
  j.at("samples").get_to(s.samples);
  j.at("decay_rate").get_to(s.decay_rate);
}

void to_json(json& j, const RunManifest& m) {
  j = {{"tool", m.tool},
       {"version", m.version},
       {"command", m.command},
       {"input_digest", m.input_digest},
       {"config", m.config},
       {"settle", m.settle},
       {"metadata", m.metadata}};
}

void from_json(const json& j, RunManifest& m) {
  j.at("tool").get_to(m.tool);
  j.at("version").get_to(m.version);
  j.at("command").get_to(m.command);
  j.at("input_digest").get_to(m.input_digest);
  m.config = j.at("config");
  j.at("settle").get_to(m.settle);
  m.metadata = j.value("metadata", json::object());
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
  }
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

RunManifest make_filter_manifest(const TimeSeries& input, const FilterChainConfig& chain,
                                 const CascadeResult& result) {
  RunManifest m;
  m.command = "filter";
  m.input_digest = series_digest(input);
  m.config = chain;
  for (std::size_t i = 0; i < result.stages.size(); ++i) {
    m.settle.push_back({i, result.stages[i].settle_samples, result.stages[i].decay_rate});
  }
  m.metadata = {{"samples", input.size()}, {"output_digest", series_digest(result.force)}};
  return m;
}

json filter_result_json(const CascadeResult& result, const RunManifest& manifest) {
  return {{"series", result.force}, {"settle", manifest.settle}, {"manifest", manifest}};
}

}  // namespace oscdecon
