#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "pai/domain.hpp"
#include "pai/errors.hpp"
#include "pai/lifting.hpp"
#include "pai/linear_operator.hpp"
#include "pai/partition.hpp"

namespace pai {

/// How a transformer's entries were obtained: exact enumeration of every
/// concrete state, or Monte Carlo column estimation with k samples per cell.
struct Provenance {
  enum class Kind { exact, sampled };
  Kind kind = Kind::exact;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  static Provenance exact() { return {}; }
  static Provenance sampled(std::size_t k, std::uint64_t seed) {
    return {Kind::sampled, k, seed};
  }
};

/// Abstract-level image of a concrete map between two partitioned domains.
template <class S>
class AbstractTransformer {
 public:
  AbstractTransformer(LinearOperator<S> op, std::shared_ptr<const Partition> in_partition,
                      std::shared_ptr<const Partition> out_partition, Provenance provenance)
      : op_(std::move(op)),
        in_(std::move(in_partition)),
        out_(std::move(out_partition)),
        provenance_(provenance) {
    if (!in_ || !out_) throw ConfigError("transformer: missing partitions");
    if (op_.cols() != in_->cell_count() || op_.rows() != out_->cell_count())
      throw DimensionError("transformer: operator shape does not match partitions");
  }

  const LinearOperator<S>& op() const noexcept { return op_; }
  const std::shared_ptr<const Partition>& in_partition() const noexcept { return in_; }
  const std::shared_ptr<const Partition>& out_partition() const noexcept { return out_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  Distribution<S> apply(const Distribution<S>& abstract_dist) const {
    return op_.apply(abstract_dist);
  }

 private:
  LinearOperator<S> op_;
  std::shared_ptr<const Partition> in_;
  std::shared_ptr<const Partition> out_;
  Provenance provenance_;
};

/// Conjugates a pushforward with the partition pair: the transformer operator
/// is abstraction(out) * pushforward * concretization(in).
template <class S>
LinearOperator<S> conjugate_pushforward(const LinearOperator<S>& pushforward,
                                        const LinearOperator<S>& abstraction_out,
                                        const LinearOperator<S>& concretization_in) {
  if (concretization_in.rows() != pushforward.cols() ||
      pushforward.rows() != abstraction_out.cols())
    throw DimensionError("conjugate_pushforward: dimension chain mismatch");
  return multiply(abstraction_out, multiply(pushforward, concretization_in),
                  OperatorRole::transformer);
}

template <class S>
AbstractTransformer<S> make_abstract_transformer(const LinearOperator<S>& pushforward,
                                                 std::shared_ptr<const Partition> in_partition,
                                                 std::shared_ptr<const Partition> out_partition) {
  auto op = conjugate_pushforward(pushforward, build_abstraction<S>(*out_partition),
                                  build_concretization<S>(*in_partition));
  return AbstractTransformer<S>(std::move(op), std::move(in_partition), std::move(out_partition),
                                Provenance::exact());
}

/// Dedicated ReLU transformer on a product-of-signs lattice: a 0/1 matrix
/// moving each sign tuple to the tuple with every '-' replaced by '0'.
/// Exact for any within-cell distribution because ReLU maps sign tuples
/// pointwise.
template <class S>
AbstractTransformer<S> sign_relu_transformer(std::shared_ptr<const Partition> in_partition,
                                             std::shared_ptr<const Partition> out_partition) {
  if (in_partition->kind() != PartitionKind::sign || out_partition->kind() != PartitionKind::sign)
    throw ConfigError("sign_relu_transformer: needs sign partitions");
  if (!in_partition->same_cell_structure(*out_partition))
    throw ConfigError("sign_relu_transformer: sign lattices differ");
  const std::size_t axes = in_partition->sign_axes();
  const std::size_t cells = in_partition->cell_count();
  std::vector<Triplet<S>> entries;
  entries.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    // Rewrite each base-3 digit 0 ('-') as 1 ('0').
    std::size_t target = 0, rest = c, scale = 1;
    for (std::size_t a = 0; a < axes; ++a) scale *= 3;
    for (std::size_t a = 0; a < axes; ++a) {
      scale /= 3;
      std::size_t digit = rest / scale;
      rest %= scale;
      target = target * 3 + (digit == 0 ? 1 : digit);
    }
    entries.push_back({target, c, scalar_traits<S>::one()});
  }
  LinearOperator<S> op(cells, cells, std::move(entries), OperatorRole::transformer);
  return AbstractTransformer<S>(std::move(op), std::move(in_partition), std::move(out_partition),
                                Provenance::exact());
}

/// Composition along a pipeline: apply first, then second.
template <class S>
AbstractTransformer<S> compose(const AbstractTransformer<S>& first,
                               const AbstractTransformer<S>& second) {
  if (!first.out_partition()->same_cell_structure(*second.in_partition()))
    throw DimensionError("compose: mid partitions do not match");
  Provenance prov = Provenance::exact();
  if (first.provenance().kind == Provenance::Kind::sampled) prov = first.provenance();
  if (second.provenance().kind == Provenance::Kind::sampled) prov = second.provenance();
  return AbstractTransformer<S>(multiply(second.op(), first.op(), OperatorRole::transformer),
                                first.in_partition(), second.out_partition(), prov);
}

/// Monte Carlo transformer for cells too large to enumerate: column a is the
/// empirical distribution of the output cell of f(x) over k uniform samples
/// from cell a, normalized exactly by construction (counts over k).
template <class S, StateDomain In, StateDomain Out, class F>
AbstractTransformer<S> sampled_transformer(F&& f, const In& dom_in,
                                           std::shared_ptr<const Partition> in_partition,
                                           const Out& dom_out,
                                           std::shared_ptr<const Partition> out_partition,
                                           std::size_t k, std::uint64_t seed,
                                           unsigned threads = 0) {
  if (in_partition->domain_size() != dom_in.size() ||
      out_partition->domain_size() != dom_out.size())
    throw DimensionError("sampled_transformer: partitions do not cover the domains");
  if (k == 0) throw ConfigError("sampled_transformer: need k >= 1");
  const std::size_t cells = in_partition->cell_count();
  std::vector<std::vector<Triplet<S>>> per_cell(cells);
  parallel_chunks(cells, 1, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t cell = begin; cell < end; ++cell) {
      if (in_partition->cells()[cell].member_count == 0) continue;
      std::vector<std::size_t> counts(out_partition->cell_count(), 0);
      for (std::size_t index : sample_cell(*in_partition, cell, k, seed))
        ++counts[out_partition->cell_of(dom_out.snap(f(dom_in.point(index))))];
      const S denom = scalar_traits<S>::from_int(static_cast<long long>(k));
      for (std::size_t out = 0; out < counts.size(); ++out)
        if (counts[out] > 0)
          per_cell[cell].push_back(
              {out, cell,
               scalar_traits<S>::from_int(static_cast<long long>(counts[out])) / denom});
    }
  });
  std::vector<Triplet<S>> entries;
  for (auto& column : per_cell)
    entries.insert(entries.end(), column.begin(), column.end());
  LinearOperator<S> op(out_partition->cell_count(), cells, std::move(entries),
                       OperatorRole::transformer);
  return AbstractTransformer<S>(std::move(op), std::move(in_partition), std::move(out_partition),
                                Provenance::sampled(k, seed));
}

}  // namespace pai
