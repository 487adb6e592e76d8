#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pai/distribution.hpp"
#include "pai/domain.hpp"
#include "pai/io.hpp"
#include "pai/linear_operator.hpp"
#include "pai/partition.hpp"
#include "pai/rng.hpp"

using namespace pai;

namespace {

template <class S>
Distribution<S> d_from_ratios(std::vector<std::pair<std::size_t, std::pair<int, int>>> entries,
                              std::size_t n) {
  std::vector<typename Distribution<S>::entry_type> out;
  for (auto& [i, r] : entries)
    out.emplace_back(i, scalar_traits<S>::from_ratio(r.first, r.second));
  return Distribution<S>(n, std::move(out));
}

// Random surjective partition: every cell gets at least one member.
Partition random_partition(CounterRng& rng, std::size_t domain_size, std::size_t cell_count) {
  std::vector<std::size_t> cell_of(domain_size);
  for (std::size_t c = 0; c < cell_count; ++c) cell_of[c] = c;
  for (std::size_t i = cell_count; i < domain_size; ++i) cell_of[i] = rng.next_below(cell_count);
  // Shuffle so the forced members are not clustered at the front.
  for (std::size_t i = domain_size; i > 1; --i)
    std::swap(cell_of[i - 1], cell_of[rng.next_below(i)]);
  std::vector<std::size_t> counts(cell_count, 0);
  for (std::size_t c : cell_of) ++counts[c];
  std::vector<CellInfo> cells(cell_count);
  for (std::size_t c = 0; c < cell_count; ++c) cells[c] = {c, "c" + std::to_string(c), counts[c]};
  return Partition(domain_size, std::move(cell_of), std::move(cells), PartitionKind::grid);
}

}  // namespace

TEST_CASE("joint indexing is row-major with the last axis fastest") {
  DiscretizedDomain<double> dom({Axis<double>{{0, 1}}, Axis<double>{{0, 1, 2}}});
  REQUIRE(dom.size() == 6);
  REQUIRE(dom.flatten({0, 0}) == 0);
  REQUIRE(dom.flatten({0, 2}) == 2);
  REQUIRE(dom.flatten({1, 0}) == 3);
  for (std::size_t i = 0; i < dom.size(); ++i) REQUIRE(dom.flatten(dom.unflatten(i)) == i);
}

TEST_CASE("domain rejects bad axes") {
  REQUIRE_THROWS_AS(DiscretizedDomain<double>({}), ConfigError);
  REQUIRE_THROWS_AS(DiscretizedDomain<double>({Axis<double>{{}}}), ConfigError);
  REQUIRE_THROWS_AS(DiscretizedDomain<double>({Axis<double>{{1, 1}}}), ConfigError);
  REQUIRE_THROWS_AS(DiscretizedDomain<double>({Axis<double>{{2, 1}}}), ConfigError);
}

TEST_CASE("snap picks the nearest value, ties toward the smaller coordinate") {
  DiscretizedDomain<double> dom({Axis<double>{{-2, -1, 0, 1, 2}}});
  REQUIRE(dom.snap({0.4}) == 2);
  REQUIRE(dom.snap({0.6}) == 3);
  REQUIRE(dom.snap({0.5}) == 2);  // tie -> smaller
  REQUIRE(dom.snap({-0.5}) == 1);
  REQUIRE(dom.snap({2.4}) == 4);  // within half a gap beyond the edge
  REQUIRE_THROWS_AS(dom.snap({2.6}), SnapError);
  REQUIRE_THROWS_AS(dom.snap({-3.1}), SnapError);
}

TEST_CASE("point domain sorts, deduplicates and snaps exactly") {
  PointDomain<double> dom(2, {{1, 1}, {0, 1}, {1, 1}, {0, 2}});
  REQUIRE(dom.size() == 3);
  REQUIRE(dom.point(0) == std::vector<double>{0, 1});
  REQUIRE(dom.snap({1, 1}) == 2);
  REQUIRE_THROWS_AS(dom.snap({5, 5}), SnapError);
}

TEST_CASE("tensor product reproduces the worked sign marginals") {
  // (3/7, 1/7, 3/7) (x) itself: 9/49 at both-negative, 3/49 at mixed, 1/49 center.
  auto run = [](auto tag) {
    using S = decltype(tag);
    auto d = d_from_ratios<S>({{0, {3, 7}}, {1, {1, 7}}, {2, {3, 7}}}, 3);
    auto joint = tensor_product(d, d);
    REQUIRE(joint.domain_size() == 9);
    REQUIRE(approx_equal(joint.at(0), scalar_traits<S>::from_ratio(9, 49)));
    REQUIRE(approx_equal(joint.at(1), scalar_traits<S>::from_ratio(3, 49)));
    REQUIRE(approx_equal(joint.at(4), scalar_traits<S>::from_ratio(1, 49)));
    REQUIRE(approx_equal(joint.at(8), scalar_traits<S>::from_ratio(9, 49)));
    REQUIRE(joint.is_normalized());
  };
  run(0.0);
  run(Rational());
  // The rational path reproduces the worked values with zero error.
  auto exact = tensor_product(d_from_ratios<Rational>({{0, {3, 7}}, {1, {1, 7}}, {2, {3, 7}}}, 3),
                              d_from_ratios<Rational>({{0, {3, 7}}, {1, {1, 7}}, {2, {3, 7}}}, 3));
  REQUIRE(exact.at(0) == Rational(9, 49));
  REQUIRE(exact.at(8) == Rational(9, 49));
}

TEST_CASE("tensor product of point masses is the joint point mass") {
  auto a = Distribution<double>::point_mass(4, 1);
  auto b = Distribution<double>::point_mass(5, 3);
  auto joint = tensor_product(a, b);
  REQUIRE(joint.support_size() == 1);
  REQUIRE(joint.at(1 * 5 + 3) == 1.0);
}

TEST_CASE("tensor product of uniforms is uniform") {
  auto joint = tensor_product(Distribution<double>::uniform(3), Distribution<double>::uniform(4));
  for (std::size_t i = 0; i < 12; ++i) REQUIRE(joint.at(i) == Catch::Approx(1.0 / 12));
}

TEST_CASE("tensor product is associative under the joint bijection") {
  CounterRng rng(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    auto random_dist = [&](std::size_t n) {
      std::vector<Distribution<Rational>::entry_type> entries;
      for (std::size_t i = 0; i < n; ++i)
        entries.emplace_back(i, Rational(1 + static_cast<long long>(rng.next_below(9))));
      return Distribution<Rational>(n, std::move(entries)).normalized();
    };
    auto d1 = random_dist(2 + rng.next_below(3));
    auto d2 = random_dist(2 + rng.next_below(3));
    auto d3 = random_dist(2 + rng.next_below(3));
    REQUIRE(tensor_product(tensor_product(d1, d2), d3) ==
            tensor_product(d1, tensor_product(d2, d3)));
  }
}

TEST_CASE("tv distance basics") {
  auto d = Distribution<double>::uniform(4);
  REQUIRE(tv_distance(d, d) == 0.0);
  REQUIRE(tv_distance(Distribution<double>::point_mass(2, 0),
                      Distribution<double>::point_mass(2, 1)) == 1.0);
  auto half = d_from_ratios<double>({{0, {1, 2}}, {1, {1, 2}}}, 2);
  REQUIRE(tv_distance(half, Distribution<double>::point_mass(2, 0)) == Catch::Approx(0.5));
  REQUIRE_THROWS_AS(tv_distance(d, Distribution<double>::uniform(5)), DimensionError);
}

TEST_CASE("distribution validates entries") {
  REQUIRE_THROWS_AS(Distribution<double>(0, {}), ConfigError);
  REQUIRE_THROWS_AS(Distribution<double>(2, {{2, 0.5}}), DimensionError);
  REQUIRE_THROWS_AS(Distribution<double>(2, {{0, -0.5}}), ConfigError);
  // duplicate indices merge
  Distribution<double> d(2, {{0, 0.25}, {0, 0.25}, {1, 0.5}});
  REQUIRE(d.at(0) == 0.5);
  REQUIRE(d.is_normalized());
}

TEST_CASE("identity operator leaves distributions unchanged") {
  auto id = LinearOperator<double>::identity(5);
  auto d = d_from_ratios<double>({{1, {1, 3}}, {4, {2, 3}}}, 5);
  REQUIRE(id.apply(d) == d);
}

TEST_CASE("apply rejects dimension mismatch") {
  auto id = LinearOperator<double>::identity(5);
  REQUIRE_THROWS_AS(id.apply(Distribution<double>::uniform(4)), DimensionError);
}

TEST_CASE("operator constructor merges duplicates and drops zeros") {
  LinearOperator<double> op(2, 2, {{0, 0, 0.5}, {0, 0, 0.5}, {1, 1, 0.0}},
                            OperatorRole::transformer);
  REQUIRE(op.entries().size() == 1);
  REQUIRE(op.entries()[0].value == 1.0);
}

TEST_CASE("apply preserves normalization for column-stochastic operators") {
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 2 + rng.next_below(6);
    const std::size_t cols = 2 + rng.next_below(6);
    std::vector<Triplet<double>> entries;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t nnz = 1 + rng.next_below(rows);
      std::vector<double> weights(nnz);
      double total = 0;
      for (auto& w : weights) total += (w = 1 + static_cast<double>(rng.next_below(9)));
      for (std::size_t k = 0; k < nnz; ++k)
        entries.push_back({rng.next_below(rows), c, weights[k] / total});
    }
    LinearOperator<double> op(rows, cols, std::move(entries), OperatorRole::transformer);
    std::vector<Distribution<double>::entry_type> dents;
    for (std::size_t c = 0; c < cols; ++c)
      dents.emplace_back(c, static_cast<double>(1 + rng.next_below(5)));
    auto d = Distribution<double>(cols, std::move(dents)).normalized();
    auto result = op.apply(d);
    REQUIRE(std::fabs(result.total_mass() - 1.0) < 1e-9);
  }
}

TEST_CASE("penrose report for the identity pair") {
  auto id = LinearOperator<double>::identity(4);
  auto report = check_penrose(id, id);
  REQUIRE(report.all_four());
  REQUIRE(report.ag_is_identity);
}

TEST_CASE("penrose conditions hold for the 7x7 sign partition pair") {
  // Sign abstraction of the integer box [-3,3]^2 and its uniform
  // concretization, checked by direct sparse multiplication.
  std::vector<double> values{-3, -2, -1, 0, 1, 2, 3};
  DiscretizedDomain<double> dom({Axis<double>{values}, Axis<double>{values}});
  auto part = sign_partition(dom);
  auto a = build_abstraction<double>(part);
  auto g = build_concretization<double>(part);
  REQUIRE(a.rows() == 9);
  REQUIRE(a.cols() == 49);
  auto report = check_penrose(a, g);
  REQUIRE(report.all_four());
  REQUIRE(report.ag_is_identity);  // surjective: every sign pair is occupied

  // Concretization spreads the both-negative cell mass as 1/9 per member.
  std::size_t negneg_members = 0;
  for (const auto& t : g.entries())
    if (t.col == 0) {
      REQUIRE(t.value == Catch::Approx(1.0 / 9));
      ++negneg_members;
    }
  REQUIRE(negneg_members == 9);
}

TEST_CASE("penrose property suite over random partitions") {
  CounterRng rng(2024, 0);
  SECTION("double path") {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 10 + rng.next_below(400);
      const std::size_t cells = 2 + rng.next_below(std::min<std::size_t>(n - 1, 30));
      auto p = random_partition(rng, n, cells);
      auto a = build_abstraction<double>(p);
      auto g = build_concretization<double>(p);
      auto report = check_penrose(a, g);
      REQUIRE(report.all_four());
      REQUIRE(report.ag_is_identity);
    }
  }
  SECTION("exact rational path") {
    for (int trial = 0; trial < 15; ++trial) {
      const std::size_t n = 5 + rng.next_below(120);
      const std::size_t cells = 2 + rng.next_below(std::min<std::size_t>(n - 1, 12));
      auto p = random_partition(rng, n, cells);
      auto report = check_penrose(build_abstraction<Rational>(p),
                                  build_concretization<Rational>(p));
      REQUIRE(report.all_four());
      REQUIRE(report.ag_is_identity);
      REQUIRE(report.max_deviation == 0.0);  // exact
    }
  }
}

TEST_CASE("concretization-abstraction composite is idempotent") {
  CounterRng rng(31, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10 + rng.next_below(150);
    const std::size_t cells = 2 + rng.next_below(8);
    auto p = random_partition(rng, n, cells);
    auto a = build_abstraction<double>(p);
    auto g = build_concretization<double>(p);
    auto ga = multiply(g, a);
    REQUIRE(operators_close(multiply(ga, ga), ga));
  }
}

TEST_CASE("check_penrose rejects incompatible shapes") {
  auto a = LinearOperator<double>::identity(3);
  auto g = LinearOperator<double>::identity(4);
  REQUIRE_THROWS_AS(check_penrose(a, g), DimensionError);
}

TEST_CASE("distribution csv round trip keeps 17 significant digits") {
  auto d = d_from_ratios<double>({{0, {1, 3}}, {7, {2, 3}}}, 10);
  std::ostringstream out;
  write_distribution_csv(out, d);
  REQUIRE(out.str().rfind("index,probability\n", 0) == 0);
  std::istringstream in(out.str());
  auto back = read_distribution_csv<double>(in, 10);
  REQUIRE(back == d);
}

TEST_CASE("operator csv round trip") {
  LinearOperator<double> op(3, 2, {{0, 0, 1.0 / 7}, {2, 1, 6.0 / 7}}, OperatorRole::transformer);
  std::ostringstream out;
  write_operator_csv(out, op);
  std::istringstream in(out.str());
  REQUIRE(read_operator_csv<double>(in, 3, 2, OperatorRole::transformer) == op);
}

TEST_CASE("counter rng streams are reproducible and independent") {
  CounterRng a(5, 1), b(5, 1), c(5, 2);
  REQUIRE(a.next() == b.next());
  REQUIRE(a.next() == b.next());
  REQUIRE(a.next() != c.next());
  CounterRng d(5, 1);
  std::size_t below = 0;
  for (int i = 0; i < 1000; ++i) {
    auto v = d.next_below(10);
    REQUIRE(v < 10);
    if (v < 5) ++below;
  }
  REQUIRE(below > 400);
  REQUIRE(below < 600);
}
