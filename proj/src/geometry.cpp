#include "hexcover/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hexcover/errors.hpp"

namespace hexcover {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = 1.7320508075688772;

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

double ring_diameter_scale(std::span<const Vec2> ring) {
  double s = 0.0;
  for (const Vec2& v : ring) s = std::max({s, std::abs(v.x), std::abs(v.y)});
  return std::max(s, 1.0);
}

Ring make_ccw(Ring ring) {
  if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
  return ring;
}

// Star-shaped polygon from jittered spokes and circularly smoothed radii.
Ring radial_polygon(std::mt19937_64& rng, int spokes, double r_lo, double r_hi,
                    int smoothing_passes) {
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_real_distribution<double> radius(r_lo, r_hi);
  std::vector<double> angles(spokes), radii(spokes);
  const double step = 2.0 * kPi / spokes;
  for (int i = 0; i < spokes; ++i) {
    angles[i] = step * (i + jitter(rng));
    radii[i] = radius(rng);
  }
  for (int pass = 0; pass < smoothing_passes; ++pass) {
    std::vector<double> next(spokes);
    for (int i = 0; i < spokes; ++i) {
      next[i] = 0.25 * radii[(i + spokes - 1) % spokes] + 0.5 * radii[i] +
                0.25 * radii[(i + 1) % spokes];
    }
    radii = std::move(next);
  }
  Ring ring;
  ring.reserve(spokes);
  for (int i = 0; i < spokes; ++i) {
    ring.push_back({radii[i] * std::cos(angles[i]), radii[i] * std::sin(angles[i])});
  }
  return ring;
}

double angular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

// Multiplies spoke radii near the given directions by a Gaussian notch.
void carve_notches(Ring& ring, std::span<const double> directions, double depth,
                   double width) {
  for (Vec2& v : ring) {
    const double theta = std::atan2(v.y, v.x);
    double factor = 1.0;
    for (double dir : directions) {
      const double g = angular_gap(theta, dir);
      factor *= 1.0 - depth * std::exp(-(g * g) / (width * width));
    }
    v = factor * v;
  }
}

Ring sample_shape(Family family, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (family) {
    case Family::CompactConvex: {
      std::uniform_int_distribution<int> spokes(8, 14);
      Ring ring = radial_polygon(rng, spokes(rng), 0.75, 1.25, 1);
      const double stretch = 1.0 + 0.6 * unit(rng);
      for (Vec2& v : ring) v.x *= stretch;
      return convex_hull(ring);
    }
    case Family::ElongatedConcave: {
      std::uniform_int_distribution<int> spokes(14, 22);
      Ring ring = radial_polygon(rng, spokes(rng), 0.8, 1.2, 2);
      const double bites[] = {kPi * (0.3 + 0.4 * unit(rng)),
                              -kPi * (0.3 + 0.4 * unit(rng))};
      carve_notches(ring, std::span<const double>(bites, 1 + (unit(rng) < 0.5)),
                    0.25 + 0.2 * unit(rng), 0.45);
      const double stretch = 3.2 + 1.6 * unit(rng);
      for (Vec2& v : ring) v.x *= stretch;
      return ring;
    }
    case Family::NarrowPassage: {
      std::uniform_int_distribution<int> spokes(18, 26);
      Ring ring = radial_polygon(rng, spokes(rng), 0.85, 1.15, 2);
      const double waist[] = {0.5 * kPi, -0.5 * kPi};
      carve_notches(ring, waist, 0.55 + 0.15 * unit(rng), 0.35);
      const double stretch = 1.8 + 0.8 * unit(rng);
      for (Vec2& v : ring) v.x *= stretch;
      return ring;
    }
  }
  throw LogicError("unknown family");
}

bool family_constraints_hold(Family family, const AoiPolygon& poly) {
  switch (family) {
    case Family::CompactConvex:
      return is_convex(poly.outer);
    case Family::ElongatedConcave:
      return !is_convex(poly.outer) && compute_obb(poly).aspect_ratio() >= 2.5;
    case Family::NarrowPassage:
      return !is_convex(poly.outer);
  }
  return false;
}

}  // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Vec2 rotate(Vec2 p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::CompactConvex:
      return "compact-convex";
    case Family::ElongatedConcave:
      return "elongated-concave";
    case Family::NarrowPassage:
      return "narrow-passage";
  }
  return "unknown";
}

Family family_from_string(std::string_view s) {
  if (s == "compact-convex") return Family::CompactConvex;
  if (s == "elongated-concave") return Family::ElongatedConcave;
  if (s == "narrow-passage") return Family::NarrowPassage;
  throw DataError("unknown polygon family: " + std::string(s));
}

double signed_area(std::span<const Vec2> ring) {
  double a = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * a;
}

double region_area(const AoiPolygon& poly) {
  double a = std::abs(signed_area(poly.outer));
  for (const Ring& h : poly.holes) a -= std::abs(signed_area(h));
  return a;
}

Vec2 ring_centroid(std::span<const Vec2> ring) {
  const double a = signed_area(ring);
  if (a == 0.0) throw DataError("degenerate ring has no centroid");
  double cx = 0.0, cy = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = ring[i];
    const Vec2 q = ring[(i + 1) % n];
    const double c = cross(p, q);
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool is_simple(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(a, b, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool is_convex(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(ring[(i + 1) % n] - ring[i], ring[(i + 2) % n] - ring[(i + 1) % n]);
    const int s = c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return sign != 0;
}

bool on_ring_boundary(Vec2 p, std::span<const Vec2> ring, double tol) {
  const double scale = ring_diameter_scale(ring);
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= tol * scale) return true;
  }
  return false;
}

bool point_in_ring(Vec2 p, std::span<const Vec2> ring) {
  if (on_ring_boundary(p, ring)) return false;
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_region(Vec2 p, const AoiPolygon& poly) {
  if (!point_in_ring(p, poly.outer)) return false;
  for (const Ring& h : poly.holes) {
    if (point_in_ring(p, h) || on_ring_boundary(p, h)) return false;
  }
  return true;
}

bool segment_crosses_ring_interior(Vec2 a, Vec2 b, std::span<const Vec2> ring) {
  // Split [a, b] at every contact with the ring; the open interior is hit iff
  // some sub-interval midpoint lies strictly inside.
  std::vector<double> ts = {0.0, 1.0};
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return point_in_ring(a, ring);
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = ring[i];
    const Vec2 q = ring[(i + 1) % n];
    const Vec2 e = q - p;
    const double denom = cross(d, e);
    if (denom != 0.0) {
      const double t = cross(p - a, e) / denom;
      const double u = cross(p - a, d) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
    } else if (cross(p - a, d) == 0.0) {
      for (Vec2 v : {p, q}) {
        const double t = dot(v - a, d) / len2;
        if (t >= 0.0 && t <= 1.0) ts.push_back(t);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (ts[k + 1] - ts[k] <= 1e-12) continue;
    const Vec2 mid = a + (0.5 * (ts[k] + ts[k + 1])) * d;
    if (point_in_ring(mid, ring)) return true;
  }
  return false;
}

bool segment_hits_any_hole(Vec2 a, Vec2 b, const AoiPolygon& poly) {
  for (const Ring& h : poly.holes) {
    if (segment_crosses_ring_interior(a, b, h)) return true;
  }
  return false;
}

std::optional<std::string> validate_polygon(const AoiPolygon& poly) {
  if (poly.outer.size() < 3) return "outer ring has fewer than 3 vertices";
  if (!is_simple(poly.outer)) return "outer ring is not simple";
  if (signed_area(poly.outer) <= 0.0) return "outer ring is not counter-clockwise";
  for (std::size_t i = 0; i < poly.holes.size(); ++i) {
    const Ring& h = poly.holes[i];
    if (h.size() < 3 || !is_simple(h)) return "hole " + std::to_string(i) + " is not simple";
    if (signed_area(h) >= 0.0) return "hole " + std::to_string(i) + " is not clockwise";
    for (Vec2 v : h) {
      if (!point_in_ring(v, poly.outer)) {
        return "hole " + std::to_string(i) + " is not strictly inside the outer ring";
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Ring& g = poly.holes[j];
      for (std::size_t a = 0; a < h.size(); ++a) {
        for (std::size_t b = 0; b < g.size(); ++b) {
          if (segments_intersect(h[a], h[(a + 1) % h.size()], g[b], g[(b + 1) % g.size()])) {
            return "holes " + std::to_string(j) + " and " + std::to_string(i) + " intersect";
          }
        }
      }
      if (point_in_ring(h[0], g) || point_in_ring(g[0], h)) {
        return "holes " + std::to_string(j) + " and " + std::to_string(i) + " are nested";
      }
    }
  }
  return std::nullopt;
}

Ring convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Ring hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2 p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

Vec2 OrientedBox::to_local(Vec2 world) const { return rotate(world - center, -angle); }

Vec2 OrientedBox::to_world(Vec2 local) const { return center + rotate(local, angle); }

double OrientedBox::aspect_ratio() const {
  if (half_extents.y <= 0.0) return std::numeric_limits<double>::infinity();
  return half_extents.x / half_extents.y;
}

OrientedBox compute_obb(const AoiPolygon& poly) {
  if (poly.outer.size() < 3) throw DataError("degenerate polygon: fewer than 3 vertices");
  const Ring hull = convex_hull(poly.outer);
  if (hull.size() < 3) throw DataError("degenerate polygon: collinear vertices");

  std::optional<OrientedBox> best;
  double best_area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
    const double phi = std::atan2(e.y, e.x);
    double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
    for (Vec2 v : hull) {
      const Vec2 l = rotate(v, -phi);
      lo_x = std::min(lo_x, l.x);
      hi_x = std::max(hi_x, l.x);
      lo_y = std::min(lo_y, l.y);
      hi_y = std::max(hi_y, l.y);
    }
    const double a = 0.5 * (hi_x - lo_x);
    const double b = 0.5 * (hi_y - lo_y);
    const Vec2 center = rotate({0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)}, phi);
    OrientedBox box;
    box.center = center;
    // Snap rotations that are whole multiples of pi/2 away from zero so
    // axis-aligned inputs report exactly 0.
    double major = a >= b ? phi : phi + 0.5 * kPi;
    major = std::fmod(major, kPi);
    if (major < 0.0) major += kPi;
    if (std::abs(major) < 1e-12 || std::abs(major - kPi) < 1e-12) major = 0.0;
    box.angle = major;
    box.half_extents = a >= b ? Vec2{a, b} : Vec2{b, a};
    const double area = 4.0 * a * b;
    const double tol = 1e-12 * std::max(area, 1.0);
    if (!best || area < best_area - tol ||
        (std::abs(area - best_area) <= tol && box.angle < best->angle)) {
      best = box;
      best_area = area;
    }
  }
  return *best;
}

SensorSpec::SensorSpec(double footprint_radius)
    : footprint_radius_nm(footprint_radius), cell_circumradius_nm(footprint_radius) {
  if (!(footprint_radius > 0.0)) throw ConfigError("sensor footprint radius must be positive");
}

double SensorSpec::cell_spacing() const { return kSqrt3 * cell_circumradius_nm; }

int hex_distance(Axial a, Axial b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

Vec2 axial_to_local(Axial a, double circumradius) {
  return {circumradius * kSqrt3 * (a.q + 0.5 * a.r), circumradius * 1.5 * a.r};
}

Ring hexagon_ring(Vec2 center, double circumradius, double frame_angle) {
  Ring ring;
  ring.reserve(6);
  for (int k = 0; k < 6; ++k) {
    const double t = kPi / 6.0 + k * kPi / 3.0;
    ring.push_back(center + rotate({circumradius * std::cos(t), circumradius * std::sin(t)},
                                   frame_angle));
  }
  return ring;
}

std::size_t Tessellation::visitable_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const HexCell& c) { return c.visitable; }));
}

Tessellation tessellate(const AoiPolygon& poly, const SensorSpec& spec) {
  return tessellate(poly, spec, compute_obb(poly));
}

Tessellation tessellate(const AoiPolygon& poly, const SensorSpec& spec,
                        const OrientedBox& frame) {
  const double R = spec.cell_circumradius_nm;
  Tessellation out;
  out.frame = frame;
  out.circumradius = R;
  const double hx = frame.half_extents.x;
  const double hy = frame.half_extents.y;
  const int r_max = static_cast<int>(std::ceil((hy + R) / (1.5 * R)));
  const Ring local_hex = hexagon_ring({0.0, 0.0}, R, 0.0);
  for (int r = -r_max; r <= r_max; ++r) {
    const double row_shift = 0.5 * r;
    const int q_lo = static_cast<int>(std::floor(-(hx + R) / (kSqrt3 * R) - row_shift)) - 1;
    const int q_hi = static_cast<int>(std::ceil((hx + R) / (kSqrt3 * R) - row_shift)) + 1;
    for (int q = q_lo; q <= q_hi; ++q) {
      const Vec2 c = axial_to_local({q, r}, R);
      // Separating-axis test between the hexagon and the box, both convex.
      // Box axes are x and y; the pointy-top hexagon adds normals at
      // 30 and 150 degrees (its y normal coincides with the box's).
      bool overlaps = true;
      const Vec2 axes[] = {{1.0, 0.0}, {0.0, 1.0}, {0.5 * kSqrt3, 0.5}, {-0.5 * kSqrt3, 0.5}};
      for (Vec2 axis : axes) {
        double hmin = INFINITY, hmax = -INFINITY;
        for (Vec2 v : local_hex) {
          const double p = dot(c + v, axis);
          hmin = std::min(hmin, p);
          hmax = std::max(hmax, p);
        }
        const double box_r = hx * std::abs(axis.x) + hy * std::abs(axis.y);
        const double overlap = std::min(hmax, box_r) - std::max(hmin, -box_r);
        if (overlap <= 1e-12 * R) {
          overlaps = false;
          break;
        }
      }
      if (!overlaps) continue;
      HexCell cell;
      cell.axial = {q, r};
      cell.centroid = frame.to_world(c);
      cell.visitable = point_in_region(cell.centroid, poly);
      out.cells.push_back(cell);
    }
  }
  return out;
}

AoiPolygon sample_polygon(Family family, AreaBand band, std::mt19937_64& rng,
                          const SampleOptions& opts) {
  if (!(band.min > 0.0) || band.min > band.max) throw ConfigError("invalid area band");
  std::uniform_real_distribution<double> area_dist(band.min, band.max);
  std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * kPi);

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    AoiPolygon poly;
    poly.family = family;
    const double target = band.min == band.max ? band.min : area_dist(rng);
    if (opts.template_ring) {
      poly.outer = make_ccw(*opts.template_ring);
      const double scale = std::sqrt(target / std::abs(signed_area(poly.outer)));
      if (scale != 1.0) {
        for (Vec2& v : poly.outer) v = scale * v;
      }
    } else {
      Ring shape = make_ccw(sample_shape(family, rng));
      const double scale = std::sqrt(target / std::abs(signed_area(shape)));
      const double spin = angle_dist(rng);
      for (Vec2& v : shape) v = rotate(scale * v, spin);
      poly.outer = std::move(shape);
    }
    const double area = region_area(poly);
    // Scaling to the target is exact up to rounding; clamp-check with slack.
    const double slack = 1e-9 * band.max;
    if (area < band.min - slack || area > band.max + slack) continue;
    if (validate_polygon(poly)) continue;
    if (!opts.template_ring && !family_constraints_hold(family, poly)) continue;
    return poly;
  }
  throw BudgetExhausted("polygon rejection budget exhausted for family " +
                        std::string(to_string(family)));
}

}  // namespace hexcover
