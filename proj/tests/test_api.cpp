#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "oracles.hpp"
#include "trapnet/api.hpp"
#include "trapnet/error.hpp"
#include "trapnet/export.hpp"

using namespace trapnet;

namespace {

Deployment sample() { return generate_synthetic(30, BoundingBox{0, 0, 20, 20}, 5); }

Json body_of(const ApiResponse& r) { return Json::parse(r.body); }

// The listener thread may not be accepting yet on the first request.
std::optional<httplib::Response> get_with_retry(httplib::Client& client, const std::string& path) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    if (auto res = client.Get(path)) return *res;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("query parsers") {
  CHECK(parse_range_list("5,6, 7.5") == std::vector<double>{5, 6, 7.5});
  CHECK_THROWS_AS(parse_range_list("5,,6"), InputError);
  CHECK_THROWS_AS(parse_range_list(""), InputError);
  CHECK_THROWS_AS(parse_range("-1"), InputError);
  CHECK_THROWS_AS(parse_range("abc"), InputError);
  CHECK(parse_range("8") == 8.0);
  CHECK(parse_gateway("auto") == std::nullopt);
  CHECK(parse_gateway("12") == SiteId{12});
  CHECK_THROWS_AS(parse_gateway("0"), InputError);
  CHECK_THROWS_AS(parse_gateway("x"), InputError);
  CHECK(parse_capacity("inf") == std::nullopt);
  CHECK(parse_capacity("unlimited") == std::nullopt);
  CHECK(parse_capacity("3") == std::size_t{3});
  CHECK_THROWS_AS(parse_capacity("0"), InputError);
}

TEST_CASE("service endpoints") {
  const auto d = sample();
  const ApiService api(d);

  SUBCASE("deployment") {
    const auto r = api.handle("/api/deployment", {});
    CHECK(r.status == 200);
    CHECK(r.content_type == "application/json");
    CHECK(r.body == deployment_json(d).dump(2) + "\n");
  }
  SUBCASE("metrics match the library") {
    const auto r = api.handle("/api/metrics", {{"range_km", "6"}});
    CHECK(r.status == 200);
    const RadioGraph g = build_radio_graph(d, 6.0);
    CHECK(r.body == to_json(metrics_row(g, std::nullopt)).dump(2) + "\n");
  }
  SUBCASE("range 0 gives an empty edge list") {
    const auto j = body_of(api.handle("/api/graph", {{"range_km", "0"}}));
    CHECK(j["edges"].empty());
    CHECK(j["nodes"].size() == 30);
  }
  SUBCASE("graph with wind") {
    const auto j = body_of(api.handle("/api/graph", {{"range_km", "8"}, {"wind_v", "2"}, {"wind_t", "4"},
                                                     {"wind_bearing", "90"}}));
    CHECK(j["wind"]["radius_km"] == 8.0);
    CHECK(j.contains("wind_arcs"));
    CHECK(api.handle("/api/graph", {{"range_km", "8"}, {"wind_v", "2"}}).status == 400);
  }
  SUBCASE("sweep") {
    const auto j = body_of(api.handle("/api/sweep", {{"ranges", "10,5"}}));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["range_km"] == 5.0);
    CHECK(!j[0].contains("completion_round"));
    const auto js = body_of(api.handle("/api/sweep", {{"ranges", "8"}, {"simulate", "1"}, {"capacity", "inf"}}));
    CHECK(js[0].contains("completion_round"));
    CHECK(body_of(api.handle("/api/sweep", {})).size() == 9);
  }
  SUBCASE("simulate") {
    const auto r = api.handle("/api/simulate", {{"range_km", "8"}, {"behavior", "collect"}, {"gateway", "auto"}});
    CHECK(r.status == 200);
    const auto j = body_of(r);
    CHECK(j["config"]["behavior"] == "collect");
    CHECK(j["summary"]["quiescent"] == true);
    const auto stalled = body_of(
        api.handle("/api/simulate", {{"range_km", "8"}, {"behavior", "route"}, {"max_rounds", "1"}}));
    CHECK(stalled["summary"]["quiescent"] == false);
  }
  SUBCASE("errors") {
    CHECK(api.handle("/api/metrics", {}).status == 400);
    CHECK(api.handle("/api/metrics", {{"range_km", "-3"}}).status == 400);
    CHECK(api.handle("/api/simulate", {{"range_km", "8"}, {"behavior", "dance"}}).status == 400);
    CHECK(api.handle("/api/metrics", {{"range_km", "5"}, {"gateway", "999"}}).status == 422);
    CHECK(api.handle("/api/simulate", {{"range_km", "8"}, {"behavior", "route"}, {"max_rounds", "0"}}).status ==
          422);
    const auto nf = api.handle("/api/nothing", {});
    CHECK(nf.status == 404);
    CHECK(body_of(nf).contains("error"));
  }
}

TEST_CASE("http server answers on an ephemeral port") {
  const ApiService api(sample());
  HttpServer server(api, ServeOptions{"127.0.0.1", 0, std::nullopt});
  const int port = server.bind();
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  const auto res = get_with_retry(client, "/api/metrics?range_km=6");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == api.handle("/api/metrics", {{"range_km", "6"}}).body);
  CHECK(res->get_header_value("Content-Type") == "application/json");

  auto bad = client.Get("/api/metrics?range_km=x");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto missing = client.Get("/nowhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body).contains("error"));

  auto index = client.Get("/");
  REQUIRE(index);
  CHECK(Json::parse(index->body)["endpoints"].size() == 5);

  server.stop();
  worker.join();
}

TEST_CASE("http server mounts a static directory") {
  const auto dir = std::filesystem::temp_directory_path() / "trapnet_static_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<p>ui</p>";
  const ApiService api(sample());
  HttpServer server(api, ServeOptions{"127.0.0.1", 0, dir.string()});
  const int port = server.bind();
  std::thread worker([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  const auto res = get_with_retry(client, "/index.html");
  REQUIRE(res);
  CHECK(res->body == "<p>ui</p>");
  auto api_res = client.Get("/api/deployment");
  REQUIRE(api_res);
  CHECK(api_res->status == 200);
  server.stop();
  worker.join();
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(HttpServer(api, ServeOptions{"127.0.0.1", 0, std::string("/no/such/dir")}), DomainError);
}
