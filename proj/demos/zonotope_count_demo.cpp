// Counts lattice points of a 2-D zonotope and of its image under a linear
// map, at a coarse and a fine lattice step.

#include <cstdio>

#include "pai/zonotope.hpp"

int main() {
  using namespace pai;

  Zonotope z;
  z.center = {Rational(1), Rational(2)};
  z.generators = {{Rational(1, 2), Rational(1, 2)},
                  {Rational(1, 2), Rational(0)},
                  {Rational(0), Rational(1, 2)}};

  Zonotope fz = transform_zonotope({{Rational(2), Rational(-1)}, {Rational(0), Rational(1)}}, z);

  for (const auto& [name, shape] : {std::pair{"z", &z}, std::pair{"f(z)", &fz}}) {
    auto hull = zonotope_polygon(*shape);
    std::printf("%s hull:", name);
    for (const auto& v : hull)
      std::printf(" (%g,%g)", scalar_traits<Rational>::to_double(v[0]),
                  scalar_traits<Rational>::to_double(v[1]));
    std::printf("\n");
    for (const auto& step : {Rational(1), Rational(1, 100)}) {
      auto points = zonotope_lattice_points(*shape, step);
      std::printf("  step %-6g -> %zu lattice points\n",
                  scalar_traits<Rational>::to_double(step), points.size());
    }
  }
  return 0;
}
