#include <catch2/catch_amalgamated.hpp>

#include "pai/analysis.hpp"
#include "pai/lifting.hpp"
#include "pai/network.hpp"
#include "pai/partition.hpp"

using namespace pai;

namespace {

template <class S>
GridSpec<S> square_grid(int low, int high, std::pair<int, int> step, std::size_t axes) {
  GridSpec<S> spec;
  for (std::size_t a = 0; a < axes; ++a)
    spec.axes.push_back(AxisRange<S>{scalar_traits<S>::from_int(low),
                                     scalar_traits<S>::from_int(high),
                                     scalar_traits<S>::from_ratio(step.first, step.second)});
  return spec;
}

Layer sum_layer() { return DenseLayer{{{1, 1}, {1, 1}}, {0, 0}}; }

}  // namespace

TEST_CASE("discretize produces the arithmetic progression") {
  auto dom = discretize(square_grid<double>(-3, 3, {1, 1}, 1));
  REQUIRE(dom.axes()[0].values == std::vector<double>{-3, -2, -1, 0, 1, 2, 3});
}

TEST_CASE("discretize keeps both boundary points at fine steps") {
  GridSpec<double> spec;
  spec.axes.push_back(AxisRange<double>{0.0, 1.0, 0.01});
  REQUIRE(discretize(spec).axes()[0].values.size() == 101);

  GridSpec<double> wide;
  wide.axes.push_back(AxisRange<double>{-3.0, 3.0, 0.01});
  REQUIRE(discretize(wide).axes()[0].values.size() == 601);

  GridSpec<Rational> exact;
  exact.axes.push_back(AxisRange<Rational>{Rational(-3), Rational(3), Rational(1, 100)});
  REQUIRE(discretize(exact).axes()[0].values.size() == 601);
}

TEST_CASE("explicit single-value axis") {
  GridSpec<double> spec;
  spec.axes.push_back(AxisValues<double>{{0.0}});
  REQUIRE(discretize(spec).size() == 1);
}

TEST_CASE("non-positive step and empty ranges are rejected") {
  GridSpec<double> spec;
  spec.axes.push_back(AxisRange<double>{0.0, 1.0, 0.0});
  REQUIRE_THROWS_AS(discretize(spec), ConfigError);
  GridSpec<double> flipped;
  flipped.axes.push_back(AxisRange<double>{1.0, 0.0, 0.5});
  REQUIRE_THROWS_AS(discretize(flipped), ConfigError);
}

TEST_CASE("affine image of the integer box is the 13-sum lattice") {
  auto dom = discretize(square_grid<double>(-3, 3, {1, 1}, 2));
  REQUIRE(dom.size() == 49);
  auto image = layer_image<double>(sum_layer(), dom);
  REQUIRE(image.size() == 13);  // sums -6..6, each appearing as the pair (s, s)
  REQUIRE(image.point(0) == std::vector<double>{-6, -6});
  REQUIRE(image.point(12) == std::vector<double>{6, 6});

  auto op = lift_function<double>(
      [&](const std::vector<double>& x) {
        return eval_layer<double>(sum_layer(), x);
      },
      dom, image);
  REQUIRE(op.rows() == 13);
  REQUIRE(op.cols() == 49);
  // Exactly one input pair lands on sum -6, namely (-3, -3) = column 0.
  std::size_t hits = 0;
  for (const auto& t : op.entries())
    if (t.row == 0) {
      REQUIRE(t.col == 0);
      REQUIRE(t.value == 1.0);
      ++hits;
    }
  REQUIRE(hits == 1);
  // Seven input pairs cancel to sum 0 (row 6).
  std::size_t zeros = 0;
  for (const auto& t : op.entries())
    if (t.row == 6) ++zeros;
  REQUIRE(zeros == 7);
}

TEST_CASE("lifting the identity gives the identity operator") {
  auto dom = discretize(square_grid<double>(-2, 2, {1, 1}, 1));
  auto op = lift_function<double>([](const std::vector<double>& x) { return x; }, dom, dom);
  REQUIRE(op == LinearOperator<double>::identity(5, OperatorRole::pushforward));
}

TEST_CASE("1-d relu pushforward matches the enumeration oracle") {
  auto dom = discretize(square_grid<double>(-2, 2, {1, 1}, 1));
  auto op = lift_layer<double>(ReluLayer{1}, dom, dom);
  REQUIRE(op.rows() == 5);
  // Oracle: push every point mass through and compare.
  for (std::size_t i = 0; i < dom.size(); ++i) {
    double v = dom.point(i)[0];
    std::size_t expected = dom.snap({v < 0 ? 0.0 : v});
    auto image = op.apply(Distribution<double>::point_mass(5, i));
    REQUIRE(image == Distribution<double>::point_mass(5, expected));
  }
}

TEST_CASE("pushforward columns all sum to one") {
  auto dom = discretize(square_grid<double>(-3, 3, {1, 2}, 2));
  auto op = lift_layer<double>(sum_layer(), dom, layer_image<double>(sum_layer(), dom));
  auto report = validate_columns(op);
  REQUIRE(report.column_stochastic);
  REQUIRE(report.zero_columns.empty());
  REQUIRE(report.max_column_error == 0.0);
}

TEST_CASE("pushforward correctness by exhaustive enumeration") {
  // Every point mass must land exactly on the snapped image of its point.
  Network net(std::vector<Layer>{DenseLayer{{{2, -1}, {1, 1}}, {1, 0}}, ReluLayer{2}});
  auto dom = discretize(square_grid<double>(-2, 2, {1, 1}, 2));
  auto image = network_image<double>(net, dom);
  auto op = lift_network<double>(net, dom, image);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    auto pushed = op.apply(Distribution<double>::point_mass(dom.size(), i));
    auto expected = image.snap(eval_network<double>(net, dom.point(i)));
    REQUIRE(pushed == Distribution<double>::point_mass(image.size(), expected));
  }
}

TEST_CASE("out-of-range image points raise a snap error naming the point") {
  auto dom = discretize(square_grid<double>(0, 3, {1, 1}, 1));
  auto narrow = discretize(square_grid<double>(0, 1, {1, 1}, 1));
  try {
    lift_function<double>(
        [](const std::vector<double>& x) { return std::vector<double>{x[0] * 10}; }, dom,
        narrow);
    FAIL("expected SnapError");
  } catch (const SnapError& e) {
    std::string message = e.what();
    REQUIRE(message.find("(10") != std::string::npos);
    REQUIRE(message.find("widen") != std::string::npos);
  }
}

TEST_CASE("uniform fine grids put mass 1/n on the zero sign cell") {
  // The sign marginal of a uniform n-point symmetric grid is
  // ((n-1)/2n, 1/n, (n-1)/2n); the zero cell vanishes as the step shrinks.
  for (std::size_t n : {7u, 61u, 601u}) {
    GridSpec<double> spec;
    double half = static_cast<double>(n - 1) / 2;
    spec.axes.push_back(AxisRange<double>{-half, half, 1.0});
    auto dom = discretize(spec);
    REQUIRE(dom.size() == n);
    auto part = sign_partition(dom);
    auto marginal =
        build_abstraction<double>(part).apply(Distribution<double>::uniform(n));
    REQUIRE(marginal.at(1) == Catch::Approx(1.0 / static_cast<double>(n)));
    REQUIRE(marginal.at(0) == Catch::Approx((n - 1.0) / (2.0 * n)));
    REQUIRE(marginal.at(2) == Catch::Approx((n - 1.0) / (2.0 * n)));
  }
}

TEST_CASE("grid refinement keeps the final sign distribution stable") {
  // Halving the step changes the abstract output by less than 2 / (points
  // per axis) in total variation.
  Network net(std::vector<Layer>{sum_layer(), ReluLayer{2}});
  auto run_at = [&](std::pair<int, int> step) {
    auto dom = discretize(square_grid<double>(-3, 3, step, 2));
    AnyDomain<double> in{dom};
    PipelinePlan<double> plan;
    auto result = run_pipeline<double>(net, in, Distribution<double>::uniform(dom.size()), plan);
    return std::pair{result.final_abstract(), dom.axes()[0].values.size()};
  };
  auto [coarse, n_coarse] = run_at({1, 10});
  auto [fine, n_fine] = run_at({1, 20});
  REQUIRE(n_fine == 2 * n_coarse - 1);
  REQUIRE(tv_distance(coarse, fine) < 2.0 / static_cast<double>(n_coarse));
}
