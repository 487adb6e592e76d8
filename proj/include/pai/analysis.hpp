#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "pai/distribution.hpp"
#include "pai/domain.hpp"
#include "pai/lifting.hpp"
#include "pai/network.hpp"
#include "pai/partition.hpp"
#include "pai/transformer.hpp"

namespace pai {

/// Either domain representation, so pipelines can start from a product grid
/// or from an explicit point set (zonotope lattices) interchangeably.
template <class S>
using AnyDomain = std::variant<DiscretizedDomain<S>, PointDomain<S>>;

template <class S>
std::size_t domain_size(const AnyDomain<S>& dom) {
  return std::visit([](const auto& d) { return d.size(); }, dom);
}

template <class S>
std::size_t domain_dim(const AnyDomain<S>& dom) {
  return std::visit([](const auto& d) { return d.dim(); }, dom);
}

template <class S>
std::vector<S> domain_point(const AnyDomain<S>& dom, std::size_t i) {
  return std::visit([&](const auto& d) { return d.point(i); }, dom);
}

template <class S>
std::size_t domain_snap(const AnyDomain<S>& dom, const std::vector<S>& pt) {
  return std::visit([&](const auto& d) { return d.snap(pt); }, dom);
}

/// Which partition to build over a domain.
template <class S>
struct PartitionChoice {
  enum class Kind { sign, grid, identity };
  Kind kind = Kind::sign;
  std::vector<S> cell_size;  // grid only
  std::vector<S> anchor;     // grid only, defaults to zeros
};

template <class S>
Partition make_partition(const PartitionChoice<S>& choice, const AnyDomain<S>& dom) {
  using Kind = typename PartitionChoice<S>::Kind;
  switch (choice.kind) {
    case Kind::sign:
      return std::visit([](const auto& d) { return sign_partition(d); }, dom);
    case Kind::identity:
      return identity_partition(domain_size(dom));
    case Kind::grid: {
      std::vector<S> anchor = choice.anchor;
      if (anchor.empty()) anchor.assign(domain_dim(dom), scalar_traits<S>::zero());
      return std::visit(
          [&](const auto& d) { return grid_partition(d, choice.cell_size, anchor); }, dom);
    }
  }
  throw ConfigError("unknown partition kind");
}

/// Per-layer output state spaces: exact image lattices by default, or
/// explicit grids that layer outputs get snapped onto.
template <class S>
struct OutputDomainChoice {
  bool exact_image = true;
  std::vector<GridSpec<S>> layer_grids;  // one per layer when !exact_image
};

struct TransformerChoice {
  bool sampled = false;
  std::size_t sample_count = 256;
  std::uint64_t seed = 0;
};

template <class S>
struct PipelinePlan {
  PartitionChoice<S> input_partition;
  PartitionChoice<S> output_partition;
  OutputDomainChoice<S> output_domains;
  TransformerChoice transformer;
  unsigned threads = 0;
};

template <class S>
struct LayerTrace {
  std::shared_ptr<const Partition> partition;  // over this layer's output domain
  Distribution<S> abstract_dist;               // abstract state after the layer
  Provenance provenance;
};

template <class S>
struct PipelineResult {
  std::shared_ptr<const Partition> input_partition;
  Distribution<S> input_abstract;
  std::vector<LayerTrace<S>> layers;
  AnyDomain<S> final_domain;

  const Distribution<S>& final_abstract() const {
    return layers.empty() ? input_abstract : layers.back().abstract_dist;
  }
  const std::shared_ptr<const Partition>& final_partition() const {
    return layers.empty() ? input_partition : layers.back().partition;
  }
};

/// Propagates an input distribution through the network layer by layer:
/// abstract the input, then apply one abstract transformer per layer.
/// ReLU layers under sign partitions use the dedicated sign-lattice
/// transformer; everything else is conjugated from a lifted pushforward.
template <class S>
PipelineResult<S> run_pipeline(const Network& net, const AnyDomain<S>& input_domain,
                               const Distribution<S>& input_dist, const PipelinePlan<S>& plan) {
  if (input_dist.domain_size() != domain_size(input_domain))
    throw DimensionError("run_pipeline: distribution does not match the input domain");
  if (!plan.output_domains.exact_image &&
      plan.output_domains.layer_grids.size() != net.layer_count())
    throw ConfigError("run_pipeline: need one output grid per layer");

  auto in_partition =
      std::make_shared<const Partition>(make_partition(plan.input_partition, input_domain));
  PipelineResult<S> result{in_partition,
                           build_abstraction<S>(*in_partition).apply(input_dist),
                           {},
                           input_domain};

  AnyDomain<S> current_domain = input_domain;
  auto current_partition = in_partition;
  Distribution<S> abstract = result.input_abstract;

  for (std::size_t t = 0; t < net.layer_count(); ++t) {
    const Layer& layer = net.layers()[t];
    AnyDomain<S> out_domain =
        plan.output_domains.exact_image
            ? AnyDomain<S>(std::visit(
                  [&](const auto& d) { return layer_image<S>(layer, d, plan.threads); },
                  current_domain))
            : AnyDomain<S>(discretize(plan.output_domains.layer_grids[t]));
    auto out_partition =
        std::make_shared<const Partition>(make_partition(plan.output_partition, out_domain));

    const bool sign_relu = std::holds_alternative<ReluLayer>(layer) &&
                           current_partition->kind() == PartitionKind::sign &&
                           out_partition->kind() == PartitionKind::sign &&
                           current_partition->same_cell_structure(*out_partition);
    AbstractTransformer<S> transformer = [&]() -> AbstractTransformer<S> {
      if (sign_relu) return sign_relu_transformer<S>(current_partition, out_partition);
      if (plan.transformer.sampled) {
        std::uint64_t layer_seed = detail::mix64(plan.transformer.seed ^ (t + 1));
        return std::visit(
            [&](const auto& din, const auto& dout) {
              return sampled_transformer<S>(
                  [&](const std::vector<S>& x) { return eval_layer<S>(layer, x); }, din,
                  current_partition, dout, out_partition, plan.transformer.sample_count,
                  layer_seed, plan.threads);
            },
            current_domain, out_domain);
      }
      auto pushforward = std::visit(
          [&](const auto& din, const auto& dout) {
            return lift_layer<S>(layer, din, dout, plan.threads);
          },
          current_domain, out_domain);
      return make_abstract_transformer<S>(pushforward, current_partition, out_partition);
    }();

    abstract = transformer.apply(abstract);
    result.layers.push_back({out_partition, abstract, transformer.provenance()});
    current_domain = std::move(out_domain);
    current_partition = out_partition;
  }
  result.final_domain = std::move(current_domain);
  return result;
}

/// Measured gap between the composed per-layer transformers and the single
/// transformer lifted from the whole network. The two agree (tv = 0) when
/// every intermediate abstract state re-concretizes to the distribution that
/// actually flows through, e.g. for within-cell-uniform inputs on one layer.
template <class S>
struct PrecisionGap {
  S tv;
  Distribution<S> composed;
  Distribution<S> direct;
};

template <class S>
PrecisionGap<S> precision_gap(const Network& net, const AnyDomain<S>& input_domain,
                              const Distribution<S>& input_dist, const PipelinePlan<S>& plan) {
  PipelineResult<S> pipeline = run_pipeline(net, input_domain, input_dist, plan);
  auto whole = std::visit(
      [&](const auto& din, const auto& dout) {
        return lift_network<S>(net, din, dout, plan.threads);
      },
      input_domain, pipeline.final_domain);
  Distribution<S> direct =
      build_abstraction<S>(*pipeline.final_partition()).apply(whole.apply(input_dist));
  S tv = tv_distance(pipeline.final_abstract(), direct);
  return {std::move(tv), pipeline.final_abstract(), std::move(direct)};
}

}  // namespace pai
