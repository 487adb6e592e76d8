#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "pai/distribution.hpp"
#include "pai/errors.hpp"
#include "pai/scalar.hpp"

namespace pai {

/// What an operator is for. Pushforwards and abstractions are deterministic
/// 0/1 column maps; concretizations spread cell mass; transformers are the
/// column-stochastic products of the other three.
enum class OperatorRole { pushforward, abstraction, concretization, transformer };

inline const char* role_name(OperatorRole role) {
  switch (role) {
    case OperatorRole::pushforward: return "pushforward";
    case OperatorRole::abstraction: return "abstraction";
    case OperatorRole::concretization: return "concretization";
    case OperatorRole::transformer: return "transformer";
  }
  return "?";
}

template <class S>
struct Triplet {
  std::size_t row;
  std::size_t col;
  S value;

  friend bool operator==(const Triplet& a, const Triplet& b) {
    return a.row == b.row && a.col == b.col && a.value == b.value;
  }
};

/// Sparse matrix in coordinate-list form, deduplicated and sorted by
/// (row, col). Acts on Distribution as an ordinary matrix-vector product.
template <class S>
class LinearOperator {
 public:
  LinearOperator(std::size_t rows, std::size_t cols, std::vector<Triplet<S>> entries,
                 OperatorRole role)
      : rows_(rows), cols_(cols), role_(role) {
    if (rows_ == 0 || cols_ == 0) throw ConfigError("operator with zero dimension");
    std::sort(entries.begin(), entries.end(), [](const Triplet<S>& a, const Triplet<S>& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    entries_.reserve(entries.size());
    for (auto& t : entries) {
      if (t.row >= rows_ || t.col >= cols_) throw DimensionError("operator entry out of range");
      if (!entries_.empty() && entries_.back().row == t.row && entries_.back().col == t.col)
        entries_.back().value += t.value;  // merge duplicates
      else
        entries_.push_back(std::move(t));
    }
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const Triplet<S>& t) {
                                    return t.value == scalar_traits<S>::zero();
                                  }),
                   entries_.end());
  }

  static LinearOperator identity(std::size_t n, OperatorRole role = OperatorRole::transformer) {
    std::vector<Triplet<S>> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, scalar_traits<S>::one()});
    return LinearOperator(n, n, std::move(entries), role);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  OperatorRole role() const noexcept { return role_; }
  const std::vector<Triplet<S>>& entries() const noexcept { return entries_; }

  /// Matrix-vector product. Accumulation follows the fixed (row, col) entry
  /// order, so results never depend on thread count.
  Distribution<S> apply(const Distribution<S>& d) const {
    if (cols_ != d.domain_size())
      throw DimensionError("apply: operator has " + std::to_string(cols_) +
                           " columns but distribution has " + std::to_string(d.domain_size()) +
                           " states");
    std::vector<typename Distribution<S>::entry_type> result;
    S acc = scalar_traits<S>::zero();
    std::size_t current_row = 0;
    bool open = false;
    for (const auto& t : entries_) {
      S mass = d.at(t.col);
      if (mass == scalar_traits<S>::zero()) continue;
      if (open && t.row != current_row) {
        if (acc != scalar_traits<S>::zero()) result.emplace_back(current_row, acc);
        acc = scalar_traits<S>::zero();
      }
      current_row = t.row;
      open = true;
      acc += t.value * mass;
    }
    if (open && acc != scalar_traits<S>::zero()) result.emplace_back(current_row, acc);
    return Distribution<S>(rows_, std::move(result));
  }

  std::vector<S> column_sums() const {
    std::vector<S> sums(cols_, scalar_traits<S>::zero());
    for (const auto& t : entries_) sums[t.col] += t.value;
    return sums;
  }

  bool operator==(const LinearOperator& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && entries_ == other.entries_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Triplet<S>> entries_;
  OperatorRole role_;
};

template <class S>
LinearOperator<S> transpose(const LinearOperator<S>& op,
                            OperatorRole role = OperatorRole::transformer) {
  std::vector<Triplet<S>> entries;
  entries.reserve(op.entries().size());
  for (const auto& t : op.entries()) entries.push_back({t.col, t.row, t.value});
  return LinearOperator<S>(op.cols(), op.rows(), std::move(entries), role);
}

/// Sparse product a * b.
template <class S>
LinearOperator<S> multiply(const LinearOperator<S>& a, const LinearOperator<S>& b,
                           OperatorRole role = OperatorRole::transformer) {
  if (a.cols() != b.rows())
    throw DimensionError("multiply: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  // Index a by column once, then walk b's entries.
  std::vector<Triplet<S>> a_by_col(a.entries());
  std::sort(a_by_col.begin(), a_by_col.end(), [](const Triplet<S>& x, const Triplet<S>& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });
  std::vector<std::size_t> col_start(a.cols() + 1, 0);
  for (const auto& t : a_by_col) ++col_start[t.col + 1];
  for (std::size_t c = 0; c < a.cols(); ++c) col_start[c + 1] += col_start[c];

  std::vector<Triplet<S>> products;
  for (const auto& tb : b.entries()) {
    for (std::size_t k = col_start[tb.row]; k < col_start[tb.row + 1]; ++k) {
      const auto& ta = a_by_col[k];
      products.push_back({ta.row, tb.col, ta.value * tb.value});
    }
  }
  return LinearOperator<S>(a.rows(), b.cols(), std::move(products), role);
}

namespace detail {

template <class S>
S max_entry_difference(const LinearOperator<S>& a, const LinearOperator<S>& b) {
  S worst = scalar_traits<S>::zero();
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  auto key = [](const Triplet<S>& t) { return std::pair<std::size_t, std::size_t>(t.row, t.col); };
  while (ia != a.entries().end() || ib != b.entries().end()) {
    S diff;
    if (ib == b.entries().end() || (ia != a.entries().end() && key(*ia) < key(*ib))) {
      diff = scalar_traits<S>::abs(ia->value);
      ++ia;
    } else if (ia == a.entries().end() || key(*ib) < key(*ia)) {
      diff = scalar_traits<S>::abs(ib->value);
      ++ib;
    } else {
      diff = scalar_traits<S>::abs(ia->value - ib->value);
      ++ia;
      ++ib;
    }
    if (diff > worst) worst = diff;
  }
  return worst;
}

}  // namespace detail

/// Entrywise |a - b| <= tol with shape equality.
template <class S>
bool operators_close(const LinearOperator<S>& a, const LinearOperator<S>& b,
                     const S& tol = scalar_traits<S>::tolerance()) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return detail::max_entry_difference(a, b) <= tol;
}

/// Result of checking the Moore-Penrose conditions for a pair (A, G):
/// AGA = A, GAG = G, AG symmetric, GA symmetric. Also reports whether
/// AG is the identity, which holds for surjective partition abstractions.
struct PenroseReport {
  bool aga_equals_a = false;
  bool gag_equals_g = false;
  bool ag_symmetric = false;
  bool ga_symmetric = false;
  bool ag_is_identity = false;
  double max_deviation = 0.0;

  bool all_four() const {
    return aga_equals_a && gag_equals_g && ag_symmetric && ga_symmetric;
  }
};

template <class S>
PenroseReport check_penrose(const LinearOperator<S>& abstraction,
                            const LinearOperator<S>& concretization) {
  const auto& a = abstraction;
  const auto& g = concretization;
  if (a.rows() != g.cols() || a.cols() != g.rows())
    throw DimensionError("check_penrose: incompatible shapes");
  const S tol = scalar_traits<S>::tolerance();

  LinearOperator<S> ag = multiply(a, g);
  LinearOperator<S> ga = multiply(g, a);
  LinearOperator<S> aga = multiply(ag, a);
  LinearOperator<S> gag = multiply(g, ag);

  PenroseReport report;
  S dev = scalar_traits<S>::zero();
  auto track = [&](const S& d) {
    if (d > dev) dev = d;
    return d <= tol;
  };
  report.aga_equals_a = track(detail::max_entry_difference(aga, a));
  report.gag_equals_g = track(detail::max_entry_difference(gag, g));
  report.ag_symmetric = track(detail::max_entry_difference(ag, transpose(ag)));
  report.ga_symmetric = track(detail::max_entry_difference(ga, transpose(ga)));
  report.ag_is_identity =
      detail::max_entry_difference(ag, LinearOperator<S>::identity(ag.rows())) <= tol;
  report.max_deviation = scalar_traits<S>::to_double(dev);
  return report;
}

/// Column profile of an operator against its role contract. Zero columns are
/// legal only for concretizations of empty cells and are reported, not hidden.
struct ColumnReport {
  bool column_stochastic = true;          ///< every non-zero column sums to 1
  std::vector<std::size_t> zero_columns;  ///< columns with no entries at all
  double max_column_error = 0.0;
};

template <class S>
ColumnReport validate_columns(const LinearOperator<S>& op) {
  ColumnReport report;
  auto sums = op.column_sums();
  std::vector<bool> seen(op.cols(), false);
  for (const auto& t : op.entries()) seen[t.col] = true;
  S worst = scalar_traits<S>::zero();
  for (std::size_t c = 0; c < op.cols(); ++c) {
    if (!seen[c]) {
      report.zero_columns.push_back(c);
      continue;
    }
    S err = scalar_traits<S>::abs(sums[c] - scalar_traits<S>::one());
    if (err > worst) worst = err;
    if (err > scalar_traits<S>::tolerance()) report.column_stochastic = false;
  }
  report.max_column_error = scalar_traits<S>::to_double(worst);
  return report;
}

}  // namespace pai
