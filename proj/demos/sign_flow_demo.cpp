// Pushes a uniform density on the integer box [-3,3]^2 through a tiny
// two-layer ReLU network under the sign-lattice abstraction and prints the
// abstract state after every layer, once in doubles and once in exact
// rationals.

#include <cstdio>

#include "pai/pai.hpp"

namespace {

template <class S>
void run() {
  using namespace pai;

  Network net(std::vector<Layer>{
      DenseLayer{{{1, 1}, {1, 1}}, {0, 0}},
      ReluLayer{2},
      DenseLayer{{{1, 1}}, {0}},
      ReluLayer{1},
  });

  GridSpec<S> grid;
  for (int a = 0; a < 2; ++a)
    grid.axes.push_back(AxisRange<S>{scalar_traits<S>::from_int(-3),
                                     scalar_traits<S>::from_int(3),
                                     scalar_traits<S>::one()});
  AnyDomain<S> box{discretize(grid)};

  PipelinePlan<S> plan;  // sign in, sign out, exact image domains
  auto result = run_pipeline<S>(net, box, Distribution<S>::uniform(domain_size(box)), plan);

  std::printf("input abstraction (%zu cells):\n", result.input_partition->cell_count());
  for (const auto& [cell, mass] : result.input_abstract.entries())
    std::printf("  %-8s %.6f\n", result.input_partition->cells()[cell].label.c_str(),
                scalar_traits<S>::to_double(mass));
  for (std::size_t t = 0; t < result.layers.size(); ++t) {
    const auto& trace = result.layers[t];
    std::printf("after layer %zu:\n", t);
    for (const auto& [cell, mass] : trace.abstract_dist.entries())
      std::printf("  %-8s %.6f\n", trace.partition->cells()[cell].label.c_str(),
                  scalar_traits<S>::to_double(mass));
  }
}

}  // namespace

int main() {
  std::printf("== double path ==\n");
  run<double>();
  std::printf("== exact rational path ==\n");
  run<pai::Rational>();
  return 0;
}
