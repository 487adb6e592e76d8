#pragma once

#include <map>
#include <utility>
#include <vector>

#include "pai/analysis.hpp"
#include "pai/distribution.hpp"
#include "pai/errors.hpp"
#include "pai/network.hpp"
#include "pai/parallel.hpp"

namespace pai {

/// Ground-truth pushforward: every support point evaluated through the
/// concrete network, masses aggregated by exact output tuple.
template <class S>
struct PushedMass {
  std::vector<std::pair<std::vector<S>, S>> outputs;  // sorted by output tuple

  S total_mass() const {
    S sum = scalar_traits<S>::zero();
    for (const auto& [point, mass] : outputs) sum += mass;
    return sum;
  }
};

template <class S>
PushedMass<S> brute_force_push(const Network& net, const Distribution<S>& dist,
                               const AnyDomain<S>& dom, std::size_t max_evaluations = 10'000'000,
                               unsigned threads = 0) {
  if (dist.domain_size() != domain_size(dom))
    throw DimensionError("brute_force_push: distribution does not match the domain");
  const std::size_t work = dist.support_size();
  if (work > max_evaluations)
    throw BudgetError("brute force enumeration needs " + std::to_string(work) +
                          " evaluations but the cap is " + std::to_string(max_evaluations),
                      work, max_evaluations);

  const auto& entries = dist.entries();
  using Bucket = std::map<std::vector<S>, S>;
  const std::size_t chunk = 4096;
  std::vector<Bucket> partial((work + chunk - 1) / chunk);
  parallel_chunks(work, chunk, threads, [&](std::size_t begin, std::size_t end, std::size_t c) {
    Bucket& bucket = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      auto out = eval_network<S>(net, domain_point(dom, entries[i].first));
      auto [it, inserted] = bucket.emplace(std::move(out), entries[i].second);
      if (!inserted) it->second += entries[i].second;
    }
  });
  // Merge in chunk order: identical totals for every thread count.
  Bucket merged;
  for (auto& bucket : partial)
    for (auto& [point, mass] : bucket) {
      auto [it, inserted] = merged.emplace(point, mass);
      if (!inserted) it->second += mass;
    }
  PushedMass<S> result;
  result.outputs.assign(merged.begin(), merged.end());
  return result;
}

/// Snaps an enumerated pushforward onto a state space and abstracts it.
template <class S>
Distribution<S> abstract_pushed_mass(const PushedMass<S>& pushed, const AnyDomain<S>& out_domain,
                                     const Partition& out_partition) {
  std::vector<typename Distribution<S>::entry_type> cell_mass;
  cell_mass.reserve(pushed.outputs.size());
  for (const auto& [point, mass] : pushed.outputs)
    cell_mass.emplace_back(out_partition.cell_of(domain_snap(out_domain, point)), mass);
  return Distribution<S>(out_partition.cell_count(), std::move(cell_mass));
}

/// Soundness/precision audit: abstract propagation vs enumerated truth.
template <class S>
struct CompareReport {
  Distribution<S> oracle_abstracted;  // over the final partition's cells
  Distribution<S> composed_abstract;
  S tv;
  std::vector<S> per_cell_delta;  // composed - oracle, dense over cells
  PipelineResult<S> pipeline;
};

template <class S>
CompareReport<S> compare_abstract(const Network& net, const AnyDomain<S>& input_domain,
                                  const Distribution<S>& input_dist, const PipelinePlan<S>& plan,
                                  std::size_t max_evaluations = 10'000'000) {
  PipelineResult<S> pipeline = run_pipeline(net, input_domain, input_dist, plan);
  PushedMass<S> pushed =
      brute_force_push(net, input_dist, input_domain, max_evaluations, plan.threads);
  Distribution<S> oracle =
      abstract_pushed_mass(pushed, pipeline.final_domain, *pipeline.final_partition());
  const Distribution<S>& composed = pipeline.final_abstract();
  S tv = tv_distance(composed, oracle);
  std::vector<S> delta(pipeline.final_partition()->cell_count(), scalar_traits<S>::zero());
  for (std::size_t c = 0; c < delta.size(); ++c) delta[c] = composed.at(c) - oracle.at(c);
  return {std::move(oracle), composed, std::move(tv), std::move(delta), std::move(pipeline)};
}

}  // namespace pai
