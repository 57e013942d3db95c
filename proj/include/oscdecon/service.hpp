#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

namespace oscdecon {

struct HttpReply {
  int status = 200;
  std::string body;  ///< JSON text
};

/// Stateless request handlers behind the HTTP API. Every handler reads only
/// the request and the (read-only) dataset directory.
class Service {
 public:
  static constexpr std::size_t kMaxInlineSamples = 10'000'000;
  static constexpr std::size_t kMaxSpectrumPoints = 4096;

  explicit Service(std::filesystem::path data_dir);

  /// POST /api/spectrum  {"dataset": id} | {"series": {...}}
  HttpReply spectrum(const std::string& body) const;
  /// POST /api/filter    {"dataset"|"series", "chain": FilterChainConfig}
  HttpReply filter(const std::string& body) const;
  /// GET /api/datasets
  HttpReply list_datasets() const;
  /// GET /api/datasets/{id}
  HttpReply get_dataset(const std::string& id) const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  std::filesystem::path data_dir_;
};

/// cpp-httplib server exposing a Service, with CORS and request logging.
class HttpServer {
 public:
  using Logger = std::function<void(const std::string&)>;

  HttpServer(Service service, Logger logger = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (-1 on failure).
  int bind_any_port(const std::string& host);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace oscdecon
