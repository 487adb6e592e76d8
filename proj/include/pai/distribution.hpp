#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "pai/errors.hpp"
#include "pai/scalar.hpp"

namespace pai {

/// Sparse probability vector over the joint states of a domain.
/// Entries are index-sorted; exact zeros are dropped; negatives rejected.
template <class S>
class Distribution {
 public:
  using entry_type = std::pair<std::size_t, S>;

  Distribution(std::size_t domain_size, std::vector<entry_type> entries)
      : domain_size_(domain_size) {
    if (domain_size_ == 0) throw ConfigError("distribution over empty domain");
    std::sort(entries.begin(), entries.end(),
              [](const entry_type& a, const entry_type& b) { return a.first < b.first; });
    entries_.reserve(entries.size());
    for (auto& [index, mass] : entries) {
      if (index >= domain_size_) throw DimensionError("distribution entry index out of range");
      if (mass < scalar_traits<S>::zero()) throw ConfigError("negative probability");
      if (!entries_.empty() && entries_.back().first == index)
        entries_.back().second += mass;  // merge duplicate indices
      else
        entries_.emplace_back(index, std::move(mass));
    }
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const entry_type& e) {
                                    return e.second == scalar_traits<S>::zero();
                                  }),
                   entries_.end());
  }

  static Distribution uniform(std::size_t n) {
    std::vector<entry_type> entries;
    entries.reserve(n);
    const S mass = scalar_traits<S>::one() / scalar_traits<S>::from_int(static_cast<long long>(n));
    for (std::size_t i = 0; i < n; ++i) entries.emplace_back(i, mass);
    return Distribution(n, std::move(entries));
  }

  static Distribution point_mass(std::size_t n, std::size_t index) {
    return Distribution(n, {{index, scalar_traits<S>::one()}});
  }

  std::size_t domain_size() const noexcept { return domain_size_; }
  const std::vector<entry_type>& entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }

  S at(std::size_t index) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), index,
        [](const entry_type& e, std::size_t i) { return e.first < i; });
    if (it != entries_.end() && it->first == index) return it->second;
    return scalar_traits<S>::zero();
  }

  S total_mass() const {
    S sum = scalar_traits<S>::zero();
    for (const auto& [index, mass] : entries_) sum += mass;
    return sum;
  }

  bool is_normalized() const { return approx_equal(total_mass(), scalar_traits<S>::one()); }

  /// Rescaled copy with total mass one.
  Distribution normalized() const {
    S sum = total_mass();
    if (sum == scalar_traits<S>::zero()) throw ConfigError("cannot normalize zero mass");
    std::vector<entry_type> scaled = entries_;
    for (auto& [index, mass] : scaled) mass = mass / sum;
    return Distribution(domain_size_, std::move(scaled));
  }

  std::vector<S> dense() const {
    std::vector<S> out(domain_size_, scalar_traits<S>::zero());
    for (const auto& [index, mass] : entries_) out[index] = mass;
    return out;
  }

  bool operator==(const Distribution& other) const {
    return domain_size_ == other.domain_size_ && entries_ == other.entries_;
  }

 private:
  std::size_t domain_size_;
  std::vector<entry_type> entries_;
};

/// Joint distribution of two independent factors. The result lives on the
/// product domain with the left factor's index varying slowest:
/// joint index = i * |d2| + j.
template <class S>
Distribution<S> tensor_product(const Distribution<S>& d1, const Distribution<S>& d2) {
  std::vector<typename Distribution<S>::entry_type> entries;
  entries.reserve(d1.support_size() * d2.support_size());
  for (const auto& [i, p] : d1.entries())
    for (const auto& [j, q] : d2.entries())
      entries.emplace_back(i * d2.domain_size() + j, p * q);
  return Distribution<S>(d1.domain_size() * d2.domain_size(), std::move(entries));
}

/// Total variation distance: half the L1 distance. Zero iff equal.
template <class S>
S tv_distance(const Distribution<S>& d1, const Distribution<S>& d2) {
  if (d1.domain_size() != d2.domain_size())
    throw DimensionError("tv_distance: distributions over different domains");
  S sum = scalar_traits<S>::zero();
  auto a = d1.entries().begin();
  auto b = d2.entries().begin();
  while (a != d1.entries().end() || b != d2.entries().end()) {
    if (b == d2.entries().end() || (a != d1.entries().end() && a->first < b->first)) {
      sum += scalar_traits<S>::abs(a->second);
      ++a;
    } else if (a == d1.entries().end() || b->first < a->first) {
      sum += scalar_traits<S>::abs(b->second);
      ++b;
    } else {
      sum += scalar_traits<S>::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return sum / scalar_traits<S>::from_int(2);
}

}  // namespace pai
