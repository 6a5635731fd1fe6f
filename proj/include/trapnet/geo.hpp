#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace trapnet {

using SiteId = std::uint32_t;

enum class CoordinateMode { geographic, planar };

// WGS84 degrees.
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Kilometres on a flat plane; y points north.
struct PlanarPoint {
  double x_km = 0.0;
  double y_km = 0.0;
  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

using Position = std::variant<GeoPoint, PlanarPoint>;

CoordinateMode mode_of(const Position& p);
const char* to_string(CoordinateMode mode);

struct TrapSite {
  SiteId id = 0;
  std::string label;
  Position position;
  friend bool operator==(const TrapSite&, const TrapSite&) = default;
};

// East/north offset in km between two positions of the same mode.
struct Displacement {
  double east_km = 0.0;
  double north_km = 0.0;
};

/// Ordered set of trap sites sharing one coordinate mode.
///
/// Construction validates every invariant (ids >= 1 and unique, geographic
/// ranges, single mode) and throws DomainError otherwise. Instances are
/// immutable; iteration always follows input order.
class Deployment {
 public:
  Deployment() = default;
  Deployment(std::vector<TrapSite> sites, CoordinateMode mode);

  const std::vector<TrapSite>& sites() const { return sites_; }
  CoordinateMode mode() const { return mode_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const TrapSite& operator[](std::size_t i) const { return sites_[i]; }

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  friend bool operator==(const Deployment&, const Deployment&) = default;

 private:
  std::vector<TrapSite> sites_;
  CoordinateMode mode_ = CoordinateMode::planar;
};

enum class DeploymentFormat { csv, geojson };

Deployment load_deployment(std::istream& source, DeploymentFormat format);
void save_deployment(const Deployment& d, std::ostream& out, DeploymentFormat format);

// Kilometres per degree used by the equirectangular approximation.
inline constexpr double kKmPerDegree = 111.32;

// Equirectangular offset from a to b. Geographic mode scales longitude by
// cos(mean latitude); planar mode is the plain coordinate difference.
Displacement displacement_km(const Position& a, const Position& b);

double distance_km(const Position& a, const Position& b);
double distance_km(const TrapSite& a, const TrapSite& b, CoordinateMode mode);

/// Projects a geographic deployment onto a local plane anchored at the first
/// site. Longitudes are scaled by the cosine of the mid latitude of the
/// deployment's extent, so pairwise distances stay within 0.5% for
/// low-latitude deployments spanning up to ~200 km.
Deployment project_planar(const Deployment& d);

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

// Uniform planar sites labelled P1..Pn with ids 1..n. Bit-reproducible for a
// given (n, bbox, seed) on any platform.
Deployment generate_synthetic(std::size_t n, const BoundingBox& bbox, std::uint64_t seed);

}  // namespace trapnet
