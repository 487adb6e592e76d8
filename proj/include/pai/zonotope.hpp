#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pai/domain.hpp"
#include "pai/errors.hpp"
#include "pai/scalar.hpp"

namespace pai {

/// Centrally symmetric polytope { center + sum e_i g_i : e_i in [-1, 1] }.
/// Geometry is kept in exact rationals so boundary lattice points never
/// flip on rounding.
struct Zonotope {
  std::vector<Rational> center;
  std::vector<std::vector<Rational>> generators;

  std::size_t dim() const { return center.size(); }

  void validate() const {
    if (center.empty()) throw ConfigError("zonotope: empty center");
    for (const auto& g : generators)
      if (g.size() != center.size())
        throw ConfigError("zonotope: generator dimension mismatch");
  }
};

/// Image of a zonotope under a linear map (matrix rows x cols = out x in).
inline Zonotope transform_zonotope(const std::vector<std::vector<Rational>>& matrix,
                                   const Zonotope& z) {
  z.validate();
  auto apply = [&](const std::vector<Rational>& v) {
    std::vector<Rational> out(matrix.size(), Rational(0));
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      if (matrix[r].size() != v.size()) throw DimensionError("transform_zonotope: bad matrix");
      for (std::size_t c = 0; c < v.size(); ++c) out[r] += matrix[r][c] * v[c];
    }
    return out;
  };
  Zonotope out;
  out.center = apply(z.center);
  for (const auto& g : z.generators) out.generators.push_back(apply(g));
  return out;
}

namespace detail {

using RPoint = std::array<Rational, 2>;

inline Rational cross(const RPoint& o, const RPoint& a, const RPoint& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Convex hull (monotone chain), counter-clockwise, collinear points dropped.
inline std::vector<RPoint> convex_hull(std::vector<RPoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<RPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Membership with boundary included; handles point and segment degeneracies.
inline bool hull_contains(const std::vector<RPoint>& hull, const RPoint& p) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return hull[0] == p;
  if (hull.size() == 2) {
    if (cross(hull[0], hull[1], p) != 0) return false;
    return std::min(hull[0][0], hull[1][0]) <= p[0] && p[0] <= std::max(hull[0][0], hull[1][0]) &&
           std::min(hull[0][1], hull[1][1]) <= p[1] && p[1] <= std::max(hull[0][1], hull[1][1]);
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const RPoint& a = hull[i];
    const RPoint& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0) return false;
  }
  return true;
}

}  // namespace detail

/// Vertices of a 2-D zonotope as a counter-clockwise convex polygon.
inline std::vector<std::array<Rational, 2>> zonotope_polygon(const Zonotope& z) {
  z.validate();
  if (z.dim() != 2) throw ConfigError("zonotope polygon: only 2-D zonotopes are supported");
  if (z.generators.size() > 20)
    throw ConfigError("zonotope polygon: too many generators for vertex enumeration");
  std::vector<detail::RPoint> candidates;
  const std::size_t combos = std::size_t{1} << z.generators.size();
  candidates.reserve(combos);
  for (std::size_t mask = 0; mask < combos; ++mask) {
    detail::RPoint p{z.center[0], z.center[1]};
    for (std::size_t g = 0; g < z.generators.size(); ++g) {
      if (mask & (std::size_t{1} << g)) {
        p[0] += z.generators[g][0];
        p[1] += z.generators[g][1];
      } else {
        p[0] -= z.generators[g][0];
        p[1] -= z.generators[g][1];
      }
    }
    candidates.push_back(p);
  }
  return detail::convex_hull(std::move(candidates));
}

/// All points of the lattice step * Z^2 inside or on the boundary of the
/// zonotope, lexicographically sorted.
inline std::vector<std::array<Rational, 2>> zonotope_lattice_points(const Zonotope& z,
                                                                    const Rational& step) {
  if (!(step > 0)) throw ConfigError("lattice step must be positive");
  auto hull = zonotope_polygon(z);
  Rational min_x = hull[0][0], max_x = hull[0][0];
  Rational min_y = hull[0][1], max_y = hull[0][1];
  for (const auto& p : hull) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  const auto i_lo = rational_ceil(min_x / step);
  const auto i_hi = rational_floor(max_x / step);
  const auto j_lo = rational_ceil(min_y / step);
  const auto j_hi = rational_floor(max_y / step);

  std::vector<std::array<Rational, 2>> points;
  for (auto i = i_lo; i <= i_hi; ++i) {
    const Rational x = Rational(i) * step;
    for (auto j = j_lo; j <= j_hi; ++j) {
      const Rational y = Rational(j) * step;
      if (detail::hull_contains(hull, {x, y})) points.push_back({x, y});
    }
  }
  std::sort(points.begin(), points.end());
  return points;
}

template <class S>
PointDomain<S> lattice_point_domain(const std::vector<std::array<Rational, 2>>& points) {
  std::vector<std::vector<S>> converted;
  converted.reserve(points.size());
  for (const auto& p : points)
    converted.push_back({scalar_traits<S>::from_double(scalar_traits<Rational>::to_double(p[0])),
                         scalar_traits<S>::from_double(scalar_traits<Rational>::to_double(p[1]))});
  return PointDomain<S>(2, std::move(converted));
}

template <>
inline PointDomain<Rational> lattice_point_domain<Rational>(
    const std::vector<std::array<Rational, 2>>& points) {
  std::vector<std::vector<Rational>> converted;
  converted.reserve(points.size());
  for (const auto& p : points) converted.push_back({p[0], p[1]});
  return PointDomain<Rational>(2, std::move(converted));
}

namespace detail {

inline Rational json_coordinate(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return rational_from_decimal(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return nearest_rational(v.get<double>());
  throw ParseError(where + ": expected a number or decimal string");
}

}  // namespace detail

/// Zonotope JSON: { "center": [..], "generators": [[..], ..] }. Coordinates
/// may be numbers (short decimals are recovered exactly) or decimal strings.
inline Zonotope parse_zonotope(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("zonotope file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("center") || !j.contains("generators"))
    throw ParseError("zonotope file: expected object with 'center' and 'generators'");
  Zonotope z;
  for (const auto& v : j["center"]) z.center.push_back(detail::json_coordinate(v, "center"));
  for (const auto& gen : j["generators"]) {
    std::vector<Rational> g;
    for (const auto& v : gen) g.push_back(detail::json_coordinate(v, "generators"));
    z.generators.push_back(std::move(g));
  }
  z.validate();
  return z;
}

inline Zonotope load_zonotope_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open zonotope file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_zonotope(buffer.str());
}

}  // namespace pai
