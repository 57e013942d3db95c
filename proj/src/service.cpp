#include "oscdecon/service.hpp"

#include <algorithm>
#include <vector>

#include "oscdecon/deconvolve.hpp"
#include "oscdecon/error.hpp"
#include "oscdecon/json_io.hpp"
#include "oscdecon/spectral.hpp"

// After Eigen: <resolv.h> (pulled in by httplib) defines a `_res` macro.
#include <httplib.h>

namespace oscdecon {

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

HttpReply error_reply(int status, std::string_view code, const std::string& message) {
  return {status, canonical_dump(json{{"error", message}, {"code", code}})};
}

bool valid_dataset_id(const std::string& id) {
  if (id.empty() || id.size() > 255) return false;
  if (id.find("..") != std::string::npos) return false;
  if (id.find_first_of("/\\") != std::string::npos) return false;
  if (id.front() == '.') return false;
  return id.size() > 4 && id.ends_with(".csv");
}

template <typename F>
HttpReply guarded(F&& handler) {
  try {
    return handler();
  } catch (const HttpError& e) {
    return error_reply(e.status, e.code, e.message);
  } catch (const Error& e) {
    return error_reply(400, to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, "InvalidArgument", e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "Internal", e.what());
  }
}

}  // namespace

Service::Service(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {}

namespace {

std::filesystem::path dataset_path(const std::filesystem::path& dir, const std::string& id) {
  if (!valid_dataset_id(id)) throw HttpError{400, "InvalidDatasetId", "invalid dataset id '" + id + "'"};
  auto path = dir / id;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw HttpError{404, "NotFound", "unknown dataset '" + id + "'"};
  }
  return path;
}

TimeSeries series_from_request(const std::filesystem::path& dir, const json& req) {
  if (!req.is_object()) throw HttpError{400, "InvalidArgument", "request body must be a JSON object"};
  if (req.contains("dataset")) {
    if (!req["dataset"].is_string()) throw HttpError{400, "InvalidArgument", "dataset must be a string"};
    return read_csv_file(dataset_path(dir, req["dataset"].get<std::string>()));
  }
  if (req.contains("series")) {
    const json& s = req["series"];
    if (s.contains("values") && s["values"].is_array() && s["values"].size() > Service::kMaxInlineSamples) {
      throw HttpError{400, "TooLarge", "inline series exceeds " +
                                           std::to_string(Service::kMaxInlineSamples) +
                                           " samples; use a dataset reference"};
    }
    TimeSeries ts = decode<TimeSeries>(s);
    ts.validate();
    return ts;
  }
  throw HttpError{400, "InvalidArgument", "request needs either 'dataset' or 'series'"};
}

}  // namespace

HttpReply Service::spectrum(const std::string& body) const {
  return guarded([&] {
    const json req = parse_json(body);
    const TimeSeries ts = series_from_request(data_dir_, req);
    const Spectrum full = periodogram(ts);
    const auto peaks = top_peaks(ts, 5);
    json out = {{"spectrum", decimate(full, kMaxSpectrumPoints)},
                {"peaks", peaks},
                {"samples", ts.size()},
                {"dt", ts.dt},
                {"input_digest", series_digest(ts)}};
    return HttpReply{200, canonical_dump(out)};
  });
}

HttpReply Service::filter(const std::string& body) const {
  return guarded([&] {
    const json req = parse_json(body);
    const TimeSeries ts = series_from_request(data_dir_, req);
    if (!req.contains("chain")) throw HttpError{400, "InvalidArgument", "request needs a 'chain'"};
    const auto chain = decode<FilterChainConfig>(req["chain"]);
    const CascadeResult result = cascade_detailed(ts, chain);
    const RunManifest manifest = make_filter_manifest(ts, chain, result);
    return HttpReply{200, canonical_dump(filter_result_json(result, manifest))};
  });
}

HttpReply Service::list_datasets() const {
  return guarded([&] {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir_, ec)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && valid_dataset_id(name)) files.push_back(entry.path());
    }
    if (ec) throw Error(ErrorCode::IoError, "cannot list " + data_dir_.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    json list = json::array();
    for (const auto& f : files) {
      const std::string bytes = read_file(f);
      list.push_back({{"id", f.filename().string()},
                      {"bytes", bytes.size()},
                      {"digest", "sha256:" + sha256_hex(bytes)}});
    }
    return HttpReply{200, canonical_dump(json{{"datasets", list}})};
  });
}

HttpReply Service::get_dataset(const std::string& id) const {
  return guarded([&] {
    const auto path = dataset_path(data_dir_, id);
    const std::string bytes = read_file(path);
    const TimeSeries ts = read_csv(bytes);
    return HttpReply{200, canonical_dump(json{
                              {"id", id}, {"digest", "sha256:" + sha256_hex(bytes)}, {"series", ts}})};
  });
}

struct HttpServer::Impl {
  Impl(Service s, Logger l) : service(std::move(s)), logger(std::move(l)) {}

  Service service;
  Logger logger;
  httplib::Server server;
};

HttpServer::HttpServer(Service service, Logger logger)
    : impl_(std::make_unique<Impl>(std::move(service), std::move(logger))) {
  auto& srv = impl_->server;
  const Service& svc = impl_->service;

  const auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.Post("/api/spectrum", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.spectrum(req.body));
  });
  srv.Post("/api/filter", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.filter(req.body));
  });
  srv.Get("/api/datasets", [&svc, send](const httplib::Request&, httplib::Response& res) {
    send(res, svc.list_datasets());
  });
  srv.Get(R"(/api/datasets/(.+))", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_dataset(req.matches[1].str()));
  });
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const HttpReply r = res.status == 404
                            ? error_reply(404, "NotFound", "no route for " + req.method + " " + req.path)
                            : error_reply(res.status, "HttpError", "request failed");
    res.set_content(r.body, "application/json");
  });
  srv.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
    if (impl_->logger) impl_->logger(req.method + " " + req.path + " " + std::to_string(res.status));
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace oscdecon
