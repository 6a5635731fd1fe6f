#include "trapnet/api.hpp"

#include <httplib.h>

#include "text_format.hpp"
#include "trapnet/error.hpp"
#include "trapnet/export.hpp"

namespace trapnet {

std::vector<double> parse_range_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    auto token = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    out.push_back(parse_range(token));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_range(std::string_view text) {
  auto v = detail::parse_double(detail::trim(text));
  if (!v || *v < 0.0) throw InputError("invalid range '" + std::string(text) + "': expected a number >= 0");
  return *v;
}

std::optional<SiteId> parse_gateway(std::string_view text) {
  text = detail::trim(text);
  if (text == "auto") return std::nullopt;
  auto id = detail::parse_integer<SiteId>(text);
  if (!id || *id == 0) throw InputError("invalid gateway '" + std::string(text) + "': expected 'auto' or an id");
  return *id;
}

std::optional<std::size_t> parse_capacity(std::string_view text) {
  text = detail::trim(text);
  if (text == "inf" || text == "unlimited") return std::nullopt;
  auto c = detail::parse_integer<std::size_t>(text);
  if (!c || *c == 0) throw InputError("invalid capacity '" + std::string(text) + "': expected >= 1 or 'inf'");
  return *c;
}

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, body.dump(2) + "\n"}; }

ApiResponse error_response(int status, const std::string& message) {
  Json body;
  body["error"] = message;
  return json_response(status, body);
}

const std::string* find_param(const QueryParams& q, const std::string& key) {
  auto it = q.find(key);
  return it == q.end() ? nullptr : &it->second;
}

const std::string& require_param(const QueryParams& q, const std::string& key) {
  const auto* v = find_param(q, key);
  if (!v) throw InputError("missing query parameter '" + key + "'");
  return *v;
}

double number_param(const QueryParams& q, const std::string& key) {
  auto v = detail::parse_double(detail::trim(require_param(q, key)));
  if (!v) throw InputError("query parameter '" + key + "' must be a number");
  return *v;
}

SimConfig sim_config(const QueryParams& q) {
  SimConfig cfg;
  if (const auto* v = find_param(q, "capacity")) cfg.link_capacity = parse_capacity(*v);
  if (const auto* v = find_param(q, "sleep_min")) {
    auto s = detail::parse_double(detail::trim(*v));
    if (!s) throw InputError("query parameter 'sleep_min' must be a number");
    cfg.sleep_minutes = *s;
  }
  if (const auto* v = find_param(q, "gateway")) cfg.gateway = parse_gateway(*v);
  if (const auto* v = find_param(q, "max_rounds")) {
    auto m = detail::parse_integer<std::size_t>(detail::trim(*v));
    if (!m) throw InputError("query parameter 'max_rounds' must be a positive integer");
    cfg.max_rounds = *m;
  }
  return cfg;
}

}  // namespace

ApiService::ApiService(Deployment d, RegimeOptions regime) : deployment_(std::move(d)), regime_(regime) {}

ApiResponse ApiService::handle(std::string_view path, const QueryParams& q) const {
  try {
    if (path == "/api/deployment") return json_response(200, deployment_json(deployment_));

    if (path == "/api/graph") {
      const RadioGraph g = build_radio_graph(deployment_, parse_range(require_param(q, "range_km")));
      const int wind_params = (q.count("wind_v") ? 1 : 0) + (q.count("wind_t") ? 1 : 0) +
                              (q.count("wind_bearing") ? 1 : 0);
      if (wind_params == 0) return json_response(200, graph_json(g));
      if (wind_params != 3) throw InputError("wind_v, wind_t and wind_bearing must be given together");
      const WindField w(number_param(q, "wind_v"), number_param(q, "wind_t"), number_param(q, "wind_bearing"));
      const WindGraph wg = build_wind_graph(deployment_, w);
      return json_response(200, graph_json(g, &wg));
    }

    if (path == "/api/metrics") {
      const RadioGraph g = build_radio_graph(deployment_, parse_range(require_param(q, "range_km")));
      std::optional<SiteId> gateway;
      if (const auto* v = find_param(q, "gateway")) gateway = parse_gateway(*v);
      return json_response(200, to_json(metrics_row(g, gateway, regime_)));
    }

    if (path == "/api/sweep") {
      SweepOptions opts;
      opts.regime = regime_;
      opts.sim = sim_config(q);
      if (const auto* v = find_param(q, "simulate")) opts.simulate = *v == "1" || *v == "true";
      const auto* ranges = find_param(q, "ranges");
      auto rows = range_sweep(deployment_, ranges ? parse_range_list(*ranges) : kStudyRanges, opts);
      return json_response(200, sweep_json(rows));
    }

    if (path == "/api/simulate") {
      const RadioGraph g = build_radio_graph(deployment_, parse_range(require_param(q, "range_km")));
      const auto& name = require_param(q, "behavior");
      auto behavior = parse_behavior(name);
      if (!behavior) throw InputError("unknown behavior '" + name + "' (route, elect, collect)");
      return json_response(200, trace_json(run_simulation(g, *behavior, sim_config(q))));
    }
  } catch (const InputError& e) {
    return error_response(400, e.what());
  } catch (const DomainError& e) {
    return error_response(422, e.what());
  }
  return error_response(404, "unknown path " + std::string(path));
}

struct HttpServer::Impl {
  const ApiService& api;
  ServeOptions opts;
  httplib::Server server;
  bool bound = false;
};

HttpServer::HttpServer(const ApiService& api, ServeOptions opts)
    : impl_(new Impl{api, std::move(opts), {}, false}) {
  auto& server = impl_->server;
  const ApiService* service = &impl_->api;

  server.Get(R"(/api/.*)", [service](const httplib::Request& req, httplib::Response& res) {
    QueryParams q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);
    ApiResponse r = service->handle(req.path, q);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });

  if (impl_->opts.static_dir) {
    if (!server.set_mount_point("/", *impl_->opts.static_dir)) {
      throw DomainError("static directory not found: " + *impl_->opts.static_dir);
    }
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      Json index;
      index["endpoints"] = {"/api/deployment", "/api/graph", "/api/metrics", "/api/sweep", "/api/simulate"};
      res.set_content(index.dump(2) + "\n", "application/json");
    });
  }
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      Json body;
      body["error"] = "unknown path " + req.path;
      res.set_content(body.dump(2) + "\n", "application/json");
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& s = impl_->server;
  int port = impl_->opts.port;
  if (port == 0) {
    port = s.bind_to_any_port(impl_->opts.host);
    if (port < 0) throw DomainError("could not bind " + impl_->opts.host);
  } else if (!s.bind_to_port(impl_->opts.host, port)) {
    throw DomainError("could not bind " + impl_->opts.host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return port;
}

void HttpServer::listen() {
  if (!impl_->bound) bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace trapnet
