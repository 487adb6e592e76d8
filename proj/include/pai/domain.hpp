#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "pai/errors.hpp"
#include "pai/scalar.hpp"

namespace pai {

// Joint indexing convention, used by every flattening in this library:
// row-major with the LAST axis varying fastest. For axis sizes (n0, .., nk-1),
//   joint(i0, .., ik-1) = ((i0 * n1 + i1) * n2 + i2) * ...
// Tensor products, partitions and operator layouts all assume this bijection.

/// One coordinate axis: a strictly increasing, non-empty list of values.
template <class S>
struct Axis {
  std::vector<S> values;
};

/// Finite product grid standing in for a continuous input box.
template <class S>
class DiscretizedDomain {
 public:
  using scalar_type = S;

  explicit DiscretizedDomain(std::vector<Axis<S>> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw ConfigError("domain must have at least one axis");
    size_ = 1;
    for (const auto& axis : axes_) {
      if (axis.values.empty()) throw ConfigError("axis must have at least one value");
      for (std::size_t i = 1; i < axis.values.size(); ++i)
        if (!(axis.values[i - 1] < axis.values[i]))
          throw ConfigError("axis values must be strictly increasing");
      size_ *= axis.values.size();
    }
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t dim() const noexcept { return axes_.size(); }
  const std::vector<Axis<S>>& axes() const noexcept { return axes_; }

  std::size_t flatten(const std::vector<std::size_t>& multi) const {
    if (multi.size() != axes_.size()) throw DimensionError("flatten: wrong index arity");
    std::size_t joint = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      if (multi[a] >= axes_[a].values.size()) throw DimensionError("flatten: index out of range");
      joint = joint * axes_[a].values.size() + multi[a];
    }
    return joint;
  }

  std::vector<std::size_t> unflatten(std::size_t joint) const {
    if (joint >= size_) throw DimensionError("unflatten: index out of range");
    std::vector<std::size_t> multi(axes_.size());
    for (std::size_t a = axes_.size(); a-- > 0;) {
      multi[a] = joint % axes_[a].values.size();
      joint /= axes_[a].values.size();
    }
    return multi;
  }

  std::vector<S> point(std::size_t joint) const {
    auto multi = unflatten(joint);
    std::vector<S> pt(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) pt[a] = axes_[a].values[multi[a]];
    return pt;
  }

  /// Nearest grid point, ties broken toward the smaller coordinate.
  /// Throws SnapError when a coordinate lies outside the axis by more than
  /// half of the adjacent grid gap.
  std::size_t snap(const std::vector<S>& pt) const {
    if (pt.size() != axes_.size()) throw DimensionError("snap: wrong point arity");
    std::size_t joint = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      joint = joint * axes_[a].values.size() + snap_axis(a, pt[a], pt);
    }
    return joint;
  }

 private:
  std::size_t snap_axis(std::size_t a, const S& v, const std::vector<S>& pt) const {
    const auto& values = axes_[a].values;
    auto it = std::lower_bound(values.begin(), values.end(), v);
    auto radius_at = [&](std::size_t lo) {
      // Half the local gap; a single-value axis has radius 0 plus tolerance.
      if (values.size() == 1) return scalar_traits<S>::tolerance();
      return S((values[lo + 1] - values[lo]) / scalar_traits<S>::from_int(2) +
               scalar_traits<S>::tolerance());
    };
    if (it == values.begin()) {
      if (values.front() - v > radius_at(0)) throw snap_error(a, v, pt);
      return 0;
    }
    if (it == values.end()) {
      if (v - values.back() > radius_at(values.size() - 2)) throw snap_error(a, v, pt);
      return values.size() - 1;
    }
    std::size_t hi = static_cast<std::size_t>(it - values.begin());
    std::size_t lo = hi - 1;
    S d_lo = v - values[lo];
    S d_hi = values[hi] - v;
    return d_lo <= d_hi ? lo : hi;  // tie -> smaller coordinate
  }

  SnapError snap_error(std::size_t axis, const S& v, const std::vector<S>& pt) const {
    std::ostringstream os;
    os << "point (";
    for (std::size_t i = 0; i < pt.size(); ++i)
      os << (i ? ", " : "") << scalar_traits<S>::to_double(pt[i]);
    os << ") outside domain on axis " << axis << " (value "
       << scalar_traits<S>::to_double(v) << "); widen the output domain";
    return SnapError(os.str());
  }

  std::vector<Axis<S>> axes_;
  std::size_t size_;
};

/// Explicit finite state list: exact image lattices, zonotope point sets.
/// Points are stored lexicographically sorted and deduplicated.
template <class S>
class PointDomain {
 public:
  using scalar_type = S;

  PointDomain(std::size_t dim, std::vector<std::vector<S>> points) : dim_(dim) {
    if (dim_ == 0) throw ConfigError("point domain must have dimension >= 1");
    for (const auto& p : points)
      if (p.size() != dim_) throw DimensionError("point domain: inconsistent point arity");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.empty()) throw ConfigError("point domain must contain at least one point");
    points_ = std::move(points);
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::vector<S>>& points() const noexcept { return points_; }
  std::vector<S> point(std::size_t i) const { return points_.at(i); }

  /// Exact membership lookup. Image lattices are built from the same
  /// evaluations that later get snapped, so equality is the right test.
  std::size_t snap(const std::vector<S>& pt) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), pt);
    if (it == points_.end() || *it != pt) {
      std::ostringstream os;
      os << "point (";
      for (std::size_t i = 0; i < pt.size(); ++i)
        os << (i ? ", " : "") << scalar_traits<S>::to_double(pt[i]);
      os << ") is not a state of the point domain";
      throw SnapError(os.str());
    }
    return static_cast<std::size_t>(it - points_.begin());
  }

  bool contains(const std::vector<S>& pt) const {
    return std::binary_search(points_.begin(), points_.end(), pt);
  }

 private:
  std::size_t dim_;
  std::vector<std::vector<S>> points_;
};

template <class D>
concept StateDomain = requires(const D& d, std::size_t i,
                               const std::vector<typename D::scalar_type>& pt) {
  { d.size() } -> std::convertible_to<std::size_t>;
  { d.dim() } -> std::convertible_to<std::size_t>;
  { d.point(i) } -> std::convertible_to<std::vector<typename D::scalar_type>>;
  { d.snap(pt) } -> std::convertible_to<std::size_t>;
};

/// Copies a domain onto another scalar path (rational grids to double, etc).
template <class T, class S>
DiscretizedDomain<T> convert_domain(const DiscretizedDomain<S>& dom) {
  std::vector<Axis<T>> axes;
  axes.reserve(dom.axes().size());
  for (const auto& axis : dom.axes()) {
    Axis<T> out;
    out.values.reserve(axis.values.size());
    for (const auto& v : axis.values)
      out.values.push_back(scalar_traits<T>::from_double(scalar_traits<S>::to_double(v)));
    axes.push_back(std::move(out));
  }
  return DiscretizedDomain<T>(std::move(axes));
}

template <class T, class S>
PointDomain<T> convert_domain(const PointDomain<S>& dom) {
  std::vector<std::vector<T>> points;
  points.reserve(dom.size());
  for (const auto& p : dom.points()) {
    std::vector<T> q;
    q.reserve(p.size());
    for (const auto& v : p)
      q.push_back(scalar_traits<T>::from_double(scalar_traits<S>::to_double(v)));
    points.push_back(std::move(q));
  }
  return PointDomain<T>(dom.dim(), std::move(points));
}

}  // namespace pai
