#pragma once

#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "pai/domain.hpp"
#include "pai/errors.hpp"
#include "pai/linear_operator.hpp"
#include "pai/network.hpp"
#include "pai/parallel.hpp"

namespace pai {

/// Arithmetic progression low, low + step, ... up to and including high.
template <class S>
struct AxisRange {
  S low;
  S high;
  S step;
};

template <class S>
struct AxisValues {
  std::vector<S> values;
};

template <class S>
using AxisSpec = std::variant<AxisRange<S>, AxisValues<S>>;

template <class S>
struct GridSpec {
  std::vector<AxisSpec<S>> axes;
};

namespace detail {

template <class S>
std::size_t range_count(const AxisRange<S>& range) {
  if (!(range.step > scalar_traits<S>::zero())) throw ConfigError("grid step must be positive");
  if (!(range.low < range.high))
    throw ConfigError("grid range needs low < high; use an explicit value list otherwise");
  if constexpr (scalar_traits<S>::is_exact) {
    return static_cast<std::size_t>(rational_floor((range.high - range.low) / range.step)) + 1;
  } else {
    double q = (range.high - range.low) / range.step;
    // Guard against 6/0.01 rounding to 599.9999...; the progression itself
    // is regenerated as low + i*step, never accumulated.
    return static_cast<std::size_t>(std::floor(q + 1e-9 * std::max(1.0, q))) + 1;
  }
}

}  // namespace detail

/// Materializes a grid spec into a product domain. Range axes produce
/// exactly floor((high - low) / step) + 1 values. When low is a multiple of
/// the step the values are generated as step * k for integer k, keeping the
/// coordinate axes (in particular exact zero) on the lattice even on the
/// float path.
template <class S>
DiscretizedDomain<S> discretize(const GridSpec<S>& spec) {
  if (spec.axes.empty()) throw ConfigError("grid spec must have at least one axis");
  std::vector<Axis<S>> axes;
  axes.reserve(spec.axes.size());
  for (const auto& axis_spec : spec.axes) {
    Axis<S> axis;
    if (const auto* range = std::get_if<AxisRange<S>>(&axis_spec)) {
      std::size_t count = detail::range_count(*range);
      axis.values.reserve(count);
      const double ratio = scalar_traits<S>::to_double(range->low) /
                           scalar_traits<S>::to_double(range->step);
      const double k_low = std::round(ratio);
      const bool on_lattice = std::fabs(ratio - k_low) <= 1e-9 * std::max(1.0, std::fabs(ratio));
      for (std::size_t i = 0; i < count; ++i) {
        if (on_lattice)
          axis.values.push_back(
              range->step * scalar_traits<S>::from_int(static_cast<long long>(k_low) +
                                                       static_cast<long long>(i)));
        else
          axis.values.push_back(range->low + range->step * scalar_traits<S>::from_int(
                                                               static_cast<long long>(i)));
      }
    } else {
      axis.values = std::get<AxisValues<S>>(axis_spec).values;
    }
    axes.push_back(std::move(axis));
  }
  return DiscretizedDomain<S>(std::move(axes));
}

/// Exact image lattice: the distinct values f takes on the domain's points.
template <class S, StateDomain In, class F>
PointDomain<S> image_domain(F&& f, const In& dom, unsigned threads = 0) {
  std::vector<std::vector<S>> outputs(dom.size());
  parallel_chunks(dom.size(), 4096, threads,
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t i = begin; i < end; ++i) outputs[i] = f(dom.point(i));
                  });
  if (outputs.empty()) throw ConfigError("image of empty domain");
  const std::size_t out_dim = outputs.front().size();
  return PointDomain<S>(out_dim, std::move(outputs));
}

/// Lifts a deterministic map to its pushforward operator: column i carries a
/// single 1 at the row of snap(f(x_i)), so columns are stochastic by
/// construction and mass is conserved exactly.
template <class S, StateDomain In, StateDomain Out, class F>
LinearOperator<S> lift_function(F&& f, const In& dom_in, const Out& dom_out,
                                unsigned threads = 0) {
  std::vector<std::size_t> target_row(dom_in.size());
  parallel_chunks(dom_in.size(), 4096, threads,
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t i = begin; i < end; ++i)
                      target_row[i] = dom_out.snap(f(dom_in.point(i)));
                  });
  std::vector<Triplet<S>> entries;
  entries.reserve(dom_in.size());
  for (std::size_t i = 0; i < dom_in.size(); ++i)
    entries.push_back({target_row[i], i, scalar_traits<S>::one()});
  return LinearOperator<S>(dom_out.size(), dom_in.size(), std::move(entries),
                           OperatorRole::pushforward);
}

template <class S, StateDomain In, StateDomain Out>
LinearOperator<S> lift_layer(const Layer& layer, const In& dom_in, const Out& dom_out,
                             unsigned threads = 0) {
  return lift_function<S>([&](const std::vector<S>& x) { return eval_layer<S>(layer, x); },
                          dom_in, dom_out, threads);
}

template <class S, StateDomain In, StateDomain Out>
LinearOperator<S> lift_network(const Network& net, const In& dom_in, const Out& dom_out,
                               unsigned threads = 0) {
  return lift_function<S>([&](const std::vector<S>& x) { return eval_network<S>(net, x); },
                          dom_in, dom_out, threads);
}

template <class S, StateDomain In>
PointDomain<S> layer_image(const Layer& layer, const In& dom_in, unsigned threads = 0) {
  return image_domain<S>([&](const std::vector<S>& x) { return eval_layer<S>(layer, x); },
                         dom_in, threads);
}

template <class S, StateDomain In>
PointDomain<S> network_image(const Network& net, const In& dom_in, unsigned threads = 0) {
  return image_domain<S>([&](const std::vector<S>& x) { return eval_network<S>(net, x); },
                         dom_in, threads);
}

}  // namespace pai
