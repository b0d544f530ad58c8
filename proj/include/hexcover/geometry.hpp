#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hexcover {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);
Vec2 rotate(Vec2 p, double angle);

using Ring = std::vector<Vec2>;

enum class Family { CompactConvex, ElongatedConcave, NarrowPassage };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

// Outer boundary counter-clockwise, holes clockwise. Units: nautical miles.
struct AoiPolygon {
  Ring outer;
  std::vector<Ring> holes;
  Family family = Family::CompactConvex;
};

// Signed shoelace area; positive for counter-clockwise rings.
double signed_area(std::span<const Vec2> ring);
// Outer area minus hole areas.
double region_area(const AoiPolygon& poly);
Vec2 ring_centroid(std::span<const Vec2> ring);

bool is_simple(std::span<const Vec2> ring);
bool is_convex(std::span<const Vec2> ring);

// Strict interior test by crossing parity; points on the boundary count as
// outside.
bool point_in_ring(Vec2 p, std::span<const Vec2> ring);
bool on_ring_boundary(Vec2 p, std::span<const Vec2> ring, double tol = 1e-12);
// Inside the outer ring and outside every hole (all strict).
bool point_in_region(Vec2 p, const AoiPolygon& poly);

// Does segment [a, b] pass through the open interior of the ring?
bool segment_crosses_ring_interior(Vec2 a, Vec2 b, std::span<const Vec2> ring);
bool segment_hits_any_hole(Vec2 a, Vec2 b, const AoiPolygon& poly);

// Validates AOIPolygon invariants; returns a description of the first
// violation, or nothing when the polygon is valid.
std::optional<std::string> validate_polygon(const AoiPolygon& poly);

Ring convex_hull(std::span<const Vec2> points);

struct OrientedBox {
  Vec2 center;
  double angle = 0.0;  // major axis direction, in [0, pi)
  Vec2 half_extents;   // (along major axis, along minor axis)

  Vec2 to_local(Vec2 world) const;
  Vec2 to_world(Vec2 local) const;
  double area() const { return 4.0 * half_extents.x * half_extents.y; }
  double aspect_ratio() const;
};

// Minimal-area enclosing rectangle by rotating calipers over the hull of the
// outer ring. Ties in area resolve to the smaller axis angle.
OrientedBox compute_obb(const AoiPolygon& poly);

struct SensorSpec {
  double footprint_radius_nm;
  double cell_circumradius_nm;

  // Cell circumradius is tied to the sensor footprint.
  explicit SensorSpec(double footprint_radius);
  double cell_spacing() const;  // centroid-to-centroid distance of adjacent cells
};

struct Axial {
  int q = 0;
  int r = 0;
  friend bool operator==(Axial a, Axial b) { return a.q == b.q && a.r == b.r; }
  friend auto operator<=>(Axial a, Axial b) {
    if (a.r != b.r) return a.r <=> b.r;
    return a.q <=> b.q;
  }
};

inline constexpr Axial kAxialDirections[6] = {{1, 0}, {1, -1}, {0, -1},
                                              {-1, 0}, {-1, 1}, {0, 1}};

int hex_distance(Axial a, Axial b);

// Pointy-top hexagon centre in the box-aligned frame; constant-r cells form
// straight rows along the major axis.
Vec2 axial_to_local(Axial a, double circumradius);
Ring hexagon_ring(Vec2 center, double circumradius, double frame_angle);

struct HexCell {
  Axial axial;
  Vec2 centroid;  // world frame
  bool visitable = false;
};

struct Tessellation {
  OrientedBox frame;
  double circumradius = 0.0;
  std::vector<HexCell> cells;  // sorted by (r, q)

  std::size_t visitable_count() const;
};

// All grid cells overlapping the oriented box; visitable when the centroid
// lies strictly inside the feasible region.
Tessellation tessellate(const AoiPolygon& poly, const SensorSpec& spec);
Tessellation tessellate(const AoiPolygon& poly, const SensorSpec& spec,
                        const OrientedBox& frame);

struct AreaBand {
  double min = 1600.0;
  double max = 3600.0;
};

struct SampleOptions {
  std::optional<Ring> template_ring;  // scaled to the band instead of sampled
  int max_attempts = 200;
};

AoiPolygon sample_polygon(Family family, AreaBand band, std::mt19937_64& rng,
                          const SampleOptions& opts = {});

}  // namespace hexcover
