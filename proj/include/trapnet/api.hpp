#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trapnet/geo.hpp"
#include "trapnet/sweep.hpp"

namespace trapnet {

// Parameter parsing shared by the CLI flags and the HTTP query strings. All
// throw InputError on malformed text.
std::vector<double> parse_range_list(std::string_view text);
double parse_range(std::string_view text);
// "auto" -> nullopt, otherwise a positive integer id.
std::optional<SiteId> parse_gateway(std::string_view text);
// "inf" / "unlimited" -> nullopt, otherwise an integer >= 1.
std::optional<std::size_t> parse_capacity(std::string_view text);

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using QueryParams = std::map<std::string, std::string>;

/// Read-only JSON views over one immutable deployment. handle() is const and
/// touches no shared mutable state, so concurrent calls are safe.
class ApiService {
 public:
  explicit ApiService(Deployment d, RegimeOptions regime = {});

  const Deployment& deployment() const { return deployment_; }

  // 200 on success, 400 malformed query, 404 unknown path, 422 domain error.
  ApiResponse handle(std::string_view path, const QueryParams& query) const;

 private:
  Deployment deployment_;
  RegimeOptions regime_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  // 0 binds an ephemeral port.
  int port = 8080;
  std::optional<std::string> static_dir;
};

/// HTTP front end for ApiService (GET /api/...). Static assets, when a
/// directory is given, are served at '/'.
class HttpServer {
 public:
  HttpServer(const ApiService& api, ServeOptions opts);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the socket and returns the bound port; throws DomainError on
  // failure.
  int bind();
  // Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trapnet
