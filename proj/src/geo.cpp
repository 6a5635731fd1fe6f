#include "trapnet/geo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "text_format.hpp"
#include "trapnet/error.hpp"

namespace trapnet {

namespace {

constexpr std::string_view kGeoHeader = "id,label,lon,lat";
constexpr std::string_view kPlanarHeader = "id,label,x_km,y_km";

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

// Longitude difference folded into [-180, 180]. Antisymmetric in its
// arguments, so distance stays bit-identical under swapping.
double lon_delta(double from, double to) {
  double d = to - from;
  if (d > 180.0) d -= 360.0;
  if (d < -180.0) d += 360.0;
  return d;
}

bool geo_in_range(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

std::string describe(const Position& p) {
  std::ostringstream os;
  if (const auto* g = std::get_if<GeoPoint>(&p)) {
    os << "(lon " << g->lon << ", lat " << g->lat << ")";
  } else {
    const auto& q = std::get<PlanarPoint>(p);
    os << "(x " << q.x_km << ", y " << q.y_km << ")";
  }
  return os.str();
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Deployment load_csv(std::istream& in) {
  std::vector<TrapSite> sites;
  std::unordered_set<SiteId> seen;
  std::optional<CoordinateMode> mode;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty() || line.front() == '#') continue;

    if (line == kGeoHeader || line == kPlanarHeader) {
      auto this_mode = line == kGeoHeader ? CoordinateMode::geographic : CoordinateMode::planar;
      if (mode && *mode != this_mode) {
        throw InputError("line " + std::to_string(line_no) + ": mixed coordinate modes (" +
                         to_string(*mode) + " then " + to_string(this_mode) + ")");
      }
      if (mode) {
        throw InputError("line " + std::to_string(line_no) + ": repeated header");
      }
      mode = this_mode;
      continue;
    }
    if (!mode) {
      throw InputError("line " + std::to_string(line_no) + ": expected header '" +
                       std::string(kGeoHeader) + "' or '" + std::string(kPlanarHeader) + "'");
    }

    auto fields = split_commas(line);
    auto fail = [&](const std::string& what) {
      return InputError("line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 4) {
      throw fail("expected 4 fields, found " + std::to_string(fields.size()));
    }
    auto id = detail::parse_integer<SiteId>(detail::trim(fields[0]));
    if (!id || *id == 0) throw fail("id must be a positive integer, got '" + std::string(fields[0]) + "'");
    auto a = detail::parse_double(detail::trim(fields[2]));
    auto b = detail::parse_double(detail::trim(fields[3]));
    if (!a || !b) throw fail("malformed coordinate");

    TrapSite site{*id, std::string(fields[1]), PlanarPoint{*a, *b}};
    if (*mode == CoordinateMode::geographic) {
      GeoPoint g{*a, *b};
      if (!geo_in_range(g)) throw fail("coordinate out of range " + describe(g));
      site.position = g;
    }
    if (!seen.insert(*id).second) throw fail("duplicate id " + std::to_string(*id));
    sites.push_back(std::move(site));
  }
  if (!mode) throw InputError("missing CSV header");
  return Deployment(std::move(sites), *mode);
}

Deployment load_geojson(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("GeoJSON parse error: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw InputError("GeoJSON: expected a FeatureCollection with a features array");
  }

  std::vector<TrapSite> sites;
  std::unordered_set<SiteId> seen;
  const auto& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    auto fail = [&](const std::string& what) {
      return InputError("feature " + std::to_string(i) + ": " + what);
    };
    if (!f.is_object() || f.value("type", "") != "Feature") throw fail("not a Feature");
    const auto geom = f.find("geometry");
    if (geom == f.end() || !geom->is_object() || geom->value("type", "") != "Point") {
      throw fail("geometry must be a Point");
    }
    const auto coords = geom->find("coordinates");
    if (coords == geom->end() || !coords->is_array() || coords->size() < 2 || !(*coords)[0].is_number() ||
        !(*coords)[1].is_number()) {
      throw fail("Point coordinates must be [lon, lat]");
    }
    const auto props = f.find("properties");
    if (props == f.end() || !props->is_object()) throw fail("missing properties");
    const auto id = props->find("id");
    if (id == props->end() || !id->is_number_integer()) throw fail("properties.id must be an integer");
    const auto label = props->find("label");
    if (label == props->end() || !label->is_string()) throw fail("properties.label must be a string");

    auto raw_id = id->get<std::int64_t>();
    if (raw_id < 1 || raw_id > std::numeric_limits<SiteId>::max()) {
      throw fail("id must be a positive integer");
    }
    GeoPoint g{(*coords)[0].get<double>(), (*coords)[1].get<double>()};
    if (!geo_in_range(g)) throw fail("coordinate out of range " + describe(g));
    auto sid = static_cast<SiteId>(raw_id);
    if (!seen.insert(sid).second) throw fail("duplicate id " + std::to_string(sid));
    sites.push_back(TrapSite{sid, label->get<std::string>(), g});
  }
  return Deployment(std::move(sites), CoordinateMode::geographic);
}

}  // namespace

CoordinateMode mode_of(const Position& p) {
  return std::holds_alternative<GeoPoint>(p) ? CoordinateMode::geographic : CoordinateMode::planar;
}

const char* to_string(CoordinateMode mode) {
  return mode == CoordinateMode::geographic ? "geographic" : "planar";
}

Deployment::Deployment(std::vector<TrapSite> sites, CoordinateMode mode)
    : sites_(std::move(sites)), mode_(mode) {
  std::unordered_set<SiteId> seen;
  for (const auto& s : sites_) {
    if (s.id == 0) throw DomainError("site ids must be >= 1");
    if (!seen.insert(s.id).second) throw DomainError("duplicate id " + std::to_string(s.id));
    if (mode_of(s.position) != mode_) {
      throw DomainError("site " + std::to_string(s.id) + " is " + to_string(mode_of(s.position)) +
                        " in a " + to_string(mode_) + " deployment");
    }
    if (const auto* g = std::get_if<GeoPoint>(&s.position); g && !geo_in_range(*g)) {
      throw DomainError("site " + std::to_string(s.id) + ": coordinate out of range " + describe(s.position));
    }
    if (const auto* p = std::get_if<PlanarPoint>(&s.position);
        p && !(std::isfinite(p->x_km) && std::isfinite(p->y_km))) {
      throw DomainError("site " + std::to_string(s.id) + ": non-finite coordinate");
    }
  }
}

Deployment load_deployment(std::istream& source, DeploymentFormat format) {
  return format == DeploymentFormat::csv ? load_csv(source) : load_geojson(source);
}

void save_deployment(const Deployment& d, std::ostream& out, DeploymentFormat format) {
  if (format == DeploymentFormat::csv) {
    out << (d.mode() == CoordinateMode::geographic ? kGeoHeader : kPlanarHeader) << '\n';
    for (const auto& s : d) {
      if (s.label.find_first_of(",\r\n") != std::string::npos) {
        throw DomainError("site " + std::to_string(s.id) + ": label cannot contain commas or newlines in CSV");
      }
      double a = 0.0, b = 0.0;
      if (const auto* g = std::get_if<GeoPoint>(&s.position)) {
        a = g->lon;
        b = g->lat;
      } else {
        const auto& p = std::get<PlanarPoint>(s.position);
        a = p.x_km;
        b = p.y_km;
      }
      out << s.id << ',' << s.label << ',' << detail::format_double(a) << ',' << detail::format_double(b) << '\n';
    }
    return;
  }

  if (d.mode() != CoordinateMode::geographic) {
    throw DomainError("GeoJSON deployments must be geographic");
  }
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const auto& s : d) {
    const auto& g = std::get<GeoPoint>(s.position);
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {g.lon, g.lat}}};
    f["properties"] = {{"id", s.id}, {"label", s.label}};
    features.push_back(std::move(f));
  }
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  out << doc.dump(2) << '\n';
}

Displacement displacement_km(const Position& a, const Position& b) {
  if (a.index() != b.index()) throw DomainError("distance between mixed coordinate modes");
  if (const auto* ga = std::get_if<GeoPoint>(&a)) {
    const auto& gb = std::get<GeoPoint>(b);
    const double mean_lat = (ga->lat + gb.lat) / 2.0;
    return {lon_delta(ga->lon, gb.lon) * std::cos(to_radians(mean_lat)) * kKmPerDegree,
            (gb.lat - ga->lat) * kKmPerDegree};
  }
  const auto& pa = std::get<PlanarPoint>(a);
  const auto& pb = std::get<PlanarPoint>(b);
  return {pb.x_km - pa.x_km, pb.y_km - pa.y_km};
}

double distance_km(const Position& a, const Position& b) {
  const auto d = displacement_km(a, b);
  return std::hypot(d.east_km, d.north_km);
}

double distance_km(const TrapSite& a, const TrapSite& b, CoordinateMode mode) {
  if (mode_of(a.position) != mode || mode_of(b.position) != mode) {
    throw DomainError("distance between mixed coordinate modes (sites " + std::to_string(a.id) + ", " +
                      std::to_string(b.id) + ")");
  }
  return distance_km(a.position, b.position);
}

Deployment project_planar(const Deployment& d) {
  if (d.empty()) throw DomainError("cannot project an empty deployment");
  if (d.mode() != CoordinateMode::geographic) throw DomainError("deployment is already planar");

  const auto& origin = std::get<GeoPoint>(d[0].position);
  double min_lat = origin.lat, max_lat = origin.lat;
  for (const auto& s : d) {
    const auto& g = std::get<GeoPoint>(s.position);
    min_lat = std::min(min_lat, g.lat);
    max_lat = std::max(max_lat, g.lat);
  }
  const double lon_scale = std::cos(to_radians((min_lat + max_lat) / 2.0)) * kKmPerDegree;

  std::vector<TrapSite> out;
  out.reserve(d.size());
  for (const auto& s : d) {
    const auto& g = std::get<GeoPoint>(s.position);
    out.push_back(TrapSite{s.id, s.label,
                           PlanarPoint{lon_delta(origin.lon, g.lon) * lon_scale, (g.lat - origin.lat) * kKmPerDegree}});
  }
  return Deployment(std::move(out), CoordinateMode::planar);
}

Deployment generate_synthetic(std::size_t n, const BoundingBox& bbox, std::uint64_t seed) {
  const bool finite = std::isfinite(bbox.min_x) && std::isfinite(bbox.min_y) && std::isfinite(bbox.max_x) &&
                      std::isfinite(bbox.max_y);
  if (!finite || bbox.min_x >= bbox.max_x || bbox.min_y >= bbox.max_y) {
    throw DomainError("bounding box is inverted or degenerate");
  }
  // mt19937_64 output is fixed by the standard; the distributions are not,
  // so the unit interval mapping is done by hand.
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<TrapSite> sites;
  sites.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = bbox.min_x + unit() * (bbox.max_x - bbox.min_x);
    const double y = bbox.min_y + unit() * (bbox.max_y - bbox.min_y);
    const auto id = static_cast<SiteId>(i + 1);
    sites.push_back(TrapSite{id, "P" + std::to_string(id), PlanarPoint{x, y}});
  }
  return Deployment(std::move(sites), CoordinateMode::planar);
}

}  // namespace trapnet
