#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pai/domain.hpp"
#include "pai/errors.hpp"
#include "pai/linear_operator.hpp"
#include "pai/rng.hpp"

namespace pai {

enum class PartitionKind { sign, grid, identity, embedding };

struct CellInfo {
  std::size_t id;
  std::string label;
  std::size_t member_count;
};

/// Assignment of every concrete state to exactly one abstract cell.
///
/// The cell list keeps every structurally declared cell, including empty
/// ones: the sign lattice over k axes always declares all 3^k sign tuples,
/// and a point-set embedding declares one cell per target point. Empty cells
/// produce zero columns in the concretization operator and are visible here
/// through member_count == 0.
class Partition {
 public:
  Partition(std::size_t domain_size, std::vector<std::size_t> cell_of,
            std::vector<CellInfo> cells, PartitionKind kind, std::size_t sign_axes = 0)
      : domain_size_(domain_size),
        cell_of_(std::move(cell_of)),
        cells_(std::move(cells)),
        kind_(kind),
        sign_axes_(sign_axes) {
    if (cell_of_.size() != domain_size_)
      throw DimensionError("partition: cell map must cover the whole domain");
    if (cells_.empty()) throw ConfigError("partition: no cells");
    members_.resize(cells_.size());
    std::vector<std::size_t> counts(cells_.size(), 0);
    for (std::size_t i = 0; i < cell_of_.size(); ++i) {
      if (cell_of_[i] >= cells_.size()) throw DimensionError("partition: cell id out of range");
      ++counts[cell_of_[i]];
    }
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (cells_[c].id != c) throw ConfigError("partition: cell ids must be 0..n-1 in order");
      if (cells_[c].member_count != counts[c])
        throw ConfigError("partition: declared member count mismatch for cell " +
                          std::to_string(c));
      members_[c].reserve(counts[c]);
    }
    for (std::size_t i = 0; i < cell_of_.size(); ++i) members_[cell_of_[i]].push_back(i);
  }

  std::size_t domain_size() const noexcept { return domain_size_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t cell_of(std::size_t index) const { return cell_of_.at(index); }
  const std::vector<std::size_t>& cell_map() const noexcept { return cell_of_; }
  const std::vector<CellInfo>& cells() const noexcept { return cells_; }
  const std::vector<std::size_t>& members(std::size_t cell) const { return members_.at(cell); }
  PartitionKind kind() const noexcept { return kind_; }
  std::size_t sign_axes() const noexcept { return sign_axes_; }

  std::size_t empty_cell_count() const {
    std::size_t n = 0;
    for (const auto& c : cells_)
      if (c.member_count == 0) ++n;
    return n;
  }

  bool operator==(const Partition& other) const {
    if (domain_size_ != other.domain_size_ || kind_ != other.kind_ ||
        cell_of_ != other.cell_of_ || cells_.size() != other.cells_.size())
      return false;
    for (std::size_t c = 0; c < cells_.size(); ++c)
      if (cells_[c].label != other.cells_[c].label) return false;
    return true;
  }

  /// Same abstract cell structure (count and labels); used to align the
  /// output cells of one transformer with the input cells of the next even
  /// when the underlying concrete domains differ.
  bool same_cell_structure(const Partition& other) const {
    if (cells_.size() != other.cells_.size()) return false;
    for (std::size_t c = 0; c < cells_.size(); ++c)
      if (cells_[c].label != other.cells_[c].label) return false;
    return true;
  }

 private:
  std::size_t domain_size_;
  std::vector<std::size_t> cell_of_;
  std::vector<CellInfo> cells_;
  PartitionKind kind_;
  std::size_t sign_axes_;
  std::vector<std::vector<std::size_t>> members_;
};

namespace detail {

inline std::size_t checked_pow3(std::size_t k) {
  std::size_t cells = 1;
  for (std::size_t i = 0; i < k; ++i) {
    cells *= 3;
    if (cells > (std::size_t{1} << 24))
      throw ConfigError("sign partition over " + std::to_string(k) +
                        " axes declares too many cells");
  }
  return cells;
}

inline std::string sign_tuple_label(std::size_t cell, std::size_t axes) {
  static const char symbols[3] = {'-', '0', '+'};
  std::string digits(axes, '0');
  for (std::size_t a = axes; a-- > 0;) {
    digits[a] = symbols[cell % 3];
    cell /= 3;
  }
  std::string label = "(";
  for (std::size_t a = 0; a < axes; ++a) {
    if (a) label += ',';
    label += digits[a];
  }
  label += ')';
  return label;
}

template <class S>
std::size_t sign_class(const S& v) {
  if (v < scalar_traits<S>::zero()) return 0;
  if (v == scalar_traits<S>::zero()) return 1;
  return 2;
}

template <class S>
std::string point_label(const std::vector<S>& pt) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < pt.size(); ++i) {
    if (i) os << ',';
    os << scalar_traits<S>::to_double(pt[i]);
  }
  os << ')';
  return os.str();
}

}  // namespace detail

/// Product-of-signs partition: each axis classifies into {-, 0, +} by exact
/// comparison with zero, joint cells ordered (-, 0, +) per axis under the
/// global indexing convention. All 3^k cells are declared even when empty.
template <StateDomain D>
Partition sign_partition(const D& dom) {
  using S = typename D::scalar_type;
  const std::size_t axes = dom.dim();
  const std::size_t cell_count = detail::checked_pow3(axes);
  std::vector<std::size_t> cell_of(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    auto pt = dom.point(i);
    std::size_t cell = 0;
    for (std::size_t a = 0; a < axes; ++a) cell = cell * 3 + detail::sign_class<S>(pt[a]);
    cell_of[i] = cell;
  }
  std::vector<CellInfo> cells(cell_count);
  std::vector<std::size_t> counts(cell_count, 0);
  for (std::size_t c : cell_of) ++counts[c];
  for (std::size_t c = 0; c < cell_count; ++c)
    cells[c] = {c, detail::sign_tuple_label(c, axes), counts[c]};
  return Partition(dom.size(), std::move(cell_of), std::move(cells), PartitionKind::sign, axes);
}

/// Axis-aligned box cells of the given widths, centered on the anchor
/// lattice: cell k along an axis covers [anchor + (k - 1/2) w, anchor + (k + 1/2) w).
/// Only occupied cells are declared, ordered lexicographically by coordinate.
template <StateDomain D, class S = typename D::scalar_type>
Partition grid_partition(const D& dom, const std::vector<S>& cell_size,
                         const std::vector<S>& anchor) {
  if (cell_size.size() != dom.dim() || anchor.size() != dom.dim())
    throw DimensionError("grid_partition: cell_size/anchor arity mismatch");
  for (const auto& w : cell_size)
    if (!(w > scalar_traits<S>::zero())) throw ConfigError("grid_partition: cell size must be positive");

  auto cell_coord = [&](const S& x, std::size_t a) -> long long {
    S q = (x - anchor[a]) / cell_size[a];
    if constexpr (scalar_traits<S>::is_exact) {
      return static_cast<long long>(rational_floor(q + scalar_traits<S>::from_ratio(1, 2)));
    } else {
      return static_cast<long long>(std::floor(q + 0.5));
    }
  };

  std::vector<std::vector<long long>> coords(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    auto pt = dom.point(i);
    std::vector<long long> c(dom.dim());
    for (std::size_t a = 0; a < dom.dim(); ++a) c[a] = cell_coord(pt[a], a);
    coords[i] = std::move(c);
  }
  std::vector<std::vector<long long>> unique_coords = coords;
  std::sort(unique_coords.begin(), unique_coords.end());
  unique_coords.erase(std::unique(unique_coords.begin(), unique_coords.end()),
                      unique_coords.end());

  std::vector<std::size_t> cell_of(dom.size());
  std::vector<std::size_t> counts(unique_coords.size(), 0);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    auto it = std::lower_bound(unique_coords.begin(), unique_coords.end(), coords[i]);
    cell_of[i] = static_cast<std::size_t>(it - unique_coords.begin());
    ++counts[cell_of[i]];
  }
  std::vector<CellInfo> cells(unique_coords.size());
  for (std::size_t c = 0; c < unique_coords.size(); ++c) {
    std::ostringstream label;
    label << "cell(";
    for (std::size_t a = 0; a < unique_coords[c].size(); ++a) {
      if (a) label << ',';
      label << unique_coords[c][a];
    }
    label << ')';
    cells[c] = {c, label.str(), counts[c]};
  }
  return Partition(dom.size(), std::move(cell_of), std::move(cells), PartitionKind::grid);
}

/// One cell per concrete state.
inline Partition identity_partition(std::size_t domain_size) {
  std::vector<std::size_t> cell_of(domain_size);
  std::vector<CellInfo> cells(domain_size);
  for (std::size_t i = 0; i < domain_size; ++i) {
    cell_of[i] = i;
    cells[i] = {i, std::to_string(i), 1};
  }
  return Partition(domain_size, std::move(cell_of), std::move(cells), PartitionKind::identity);
}

/// Embeds a point set into a superset: one declared cell per superset point,
/// occupied exactly by the matching subset points. This is the abstraction
/// used when a handful of concrete inputs live inside a zonotope's lattice.
template <class S>
Partition embedding_partition(const PointDomain<S>& sub, const PointDomain<S>& super) {
  if (sub.dim() != super.dim()) throw DimensionError("embedding_partition: dimension mismatch");
  std::vector<std::size_t> cell_of(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) cell_of[i] = super.snap(sub.point(i));
  std::vector<std::size_t> counts(super.size(), 0);
  for (std::size_t c : cell_of) ++counts[c];
  std::vector<CellInfo> cells(super.size());
  for (std::size_t c = 0; c < super.size(); ++c)
    cells[c] = {c, detail::point_label(super.point(c)), counts[c]};
  return Partition(sub.size(), std::move(cell_of), std::move(cells), PartitionKind::embedding);
}

/// Abstraction operator: 0/1 matrix classifying each concrete state into its
/// cell. Shape: declared cells x domain size; every column has exactly one 1.
template <class S>
LinearOperator<S> build_abstraction(const Partition& p) {
  std::vector<Triplet<S>> entries;
  entries.reserve(p.domain_size());
  for (std::size_t i = 0; i < p.domain_size(); ++i)
    entries.push_back({p.cell_of(i), i, scalar_traits<S>::one()});
  return LinearOperator<S>(p.cell_count(), p.domain_size(), std::move(entries),
                           OperatorRole::abstraction);
}

/// Concretization operator, the Moore-Penrose pseudo-inverse of the
/// abstraction: each cell's mass is spread uniformly over its members,
/// G = A^T diag(1 / member count). Empty cells yield zero columns.
template <class S>
LinearOperator<S> build_concretization(const Partition& p) {
  std::vector<Triplet<S>> entries;
  entries.reserve(p.domain_size());
  for (std::size_t i = 0; i < p.domain_size(); ++i) {
    std::size_t cell = p.cell_of(i);
    std::size_t count = p.cells()[cell].member_count;
    entries.push_back({i, cell,
                       scalar_traits<S>::one() /
                           scalar_traits<S>::from_int(static_cast<long long>(count))});
  }
  return LinearOperator<S>(p.domain_size(), p.cell_count(), std::move(entries),
                           OperatorRole::concretization);
}

/// k member indices drawn uniformly with replacement from one cell,
/// deterministic per (seed, cell).
inline std::vector<std::size_t> sample_cell(const Partition& p, std::size_t cell, std::size_t k,
                                            std::uint64_t seed) {
  if (cell >= p.cell_count()) throw DimensionError("sample_cell: no such cell");
  const auto& members = p.members(cell);
  if (members.empty())
    throw ConfigError("sample_cell: cell " + std::to_string(cell) + " is empty");
  if (k == 0) throw ConfigError("sample_cell: need k >= 1");
  CounterRng rng(seed, cell);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.push_back(members[rng.next_below(members.size())]);
  return out;
}

}  // namespace pai
