#include <doctest.h>

#include <cmath>

#include "otmax/lab.hpp"
#include "otmax/symmetry.hpp"

using namespace otmax;

namespace {

GridDensity box_1d(double x_lo, double x_hi, double a, double b, double h) {
  const int n = (int)std::llround((x_hi - x_lo) / h);
  std::vector<double> vals(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double lo = x_lo + i * h, hi = lo + h;
    vals[i] = std::max(0.0, std::min(hi, b) - std::max(lo, a)) / h;
  }
  return GridDensity(1, h, {x_lo, 0.0}, {n, 1}, std::move(vals));
}

}  // namespace

TEST_CASE("reflection is an involution and an isometry") {
  const Reflection refl{{0.0, 1.0}, {0.3, -0.7}};
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 y{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 xx = refl.apply(refl.apply(x));
    CHECK(std::abs(xx.x - x.x) <= 1e-12);
    CHECK(std::abs(xx.y - x.y) <= 1e-12);
    CHECK(std::abs(norm(refl.apply(x) - refl.apply(y)) - norm(x - y)) <=
          1e-12);
  }
}

TEST_CASE("median offsets of simple densities") {
  const GridDensity sym = box_1d(-1.0, 1.0, -0.5, 0.5, 0.01);
  CHECK(std::abs(median_offsets(sym)[0]) <= 0.01);

  const GridDensity chi = box_1d(-0.5, 1.5, 0.0, 1.0, 0.01);
  CHECK(median_offsets(chi)[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("median offsets of a 2D L-shape split the mass in half") {
  // L-shape: [0,1]x[0,0.6] plus [0,0.5]x[0.6,1.4], total area 1
  const double h = 0.02;
  const int n = 70;
  std::vector<double> vals((std::size_t)n * n, 0.0);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double x = h * (ix + 0.5), y = h * (iy + 0.5);
      const bool in = (x < 1.0 && y < 0.6) || (x < 0.5 && y >= 0.6 && y < 1.4);
      if (in) vals[(std::size_t)iy * n + ix] = 1.0;
    }
  const GridDensity rho(2, h, {0.0, 0.0}, {n, n}, vals);
  REQUIRE(mass(rho) == doctest::Approx(1.0).epsilon(1e-9));
  const std::vector<double> med = median_offsets(rho);
  for (int axis = 0; axis < 2; ++axis) {
    double below = 0.0;
    for (int i = 0; i < rho.cell_count(); ++i) {
      const Vec2 c = rho.center(i);
      if ((axis == 0 ? c.x : c.y) < med[axis])
        below += rho.value(i) * rho.cell_measure();
    }
    CHECK(std::abs(below - 0.5) <= 2 * h);
  }
}

TEST_CASE("median offsets shift with whole-cell translations") {
  Rng rng(9);
  const GridDensity rho = random_density_1d(rng, 0.01, true);
  const double m0 = median_offsets(rho)[0];
  const GridDensity moved(1, rho.cell_width(),
                          {rho.origin()[0] + 5 * rho.cell_width(), 0.0},
                          rho.shape(), rho.values());
  CHECK(median_offsets(moved)[0] == doctest::Approx(m0 + 0.05).epsilon(1e-12));
}

TEST_CASE("symmetrize keeps one half and mirrors it") {
  const GridDensity chi = box_1d(-0.5, 1.5, 0.0, 1.0, 0.01);
  const Reflection refl{{1.0, 0.0}, {0.5, 0.0}};
  const SymmetrizeResult s1 = symmetrize(chi, refl, 1);
  CHECK(mass(s1.density) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s1.clamp_mass == 0.0);
  // chi_[0,1] is already symmetric about 0.5
  for (int i = 0; i < chi.cell_count(); ++i) {
    const Vec2 c = chi.center(i);
    double v = 0.0;
    for (int j = 0; j < s1.density.cell_count(); ++j)
      if (std::abs(s1.density.center(j).x - c.x) < 1e-12)
        v = s1.density.value(j);
    CHECK(v == doctest::Approx(chi.value(i)).epsilon(1e-12));
  }

  const SymmetrizeResult s2 = symmetrize(chi, refl, 2);
  CHECK(mass(s2.density) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("symmetrize about a median preserves mass within two cells") {
  Rng rng(13);
  const GridDensity rho = random_density_1d(rng, 0.01, true);
  const double med = median_offsets(rho)[0];
  const Reflection refl{{1.0, 0.0}, {med, 0.0}};
  for (int side : {1, 2}) {
    const SymmetrizeResult s = symmetrize(rho, refl, side);
    CHECK(std::abs(mass(s.density) - 1.0) <= 2 * rho.cell_measure() + 1e-9);
  }
}

TEST_CASE("non-axis-aligned reflections are rejected") {
  const GridDensity chi = box_1d(-0.5, 1.5, 0.0, 1.0, 0.01);
  const double s = std::sqrt(0.5);
  CHECK_THROWS_AS(symmetrize(chi, Reflection{{s, s}, {0.5, 0.0}}, 1),
                  UnsupportedGeometryError);
  CHECK_THROWS_AS(symmetrize(chi, Reflection{{0.0, 1.0}, {0.5, 0.0}}, 1),
                  UnsupportedGeometryError);  // y-axis on a 1D grid
}

TEST_CASE("reflect_plan is an isometric involution") {
  const GridDensity ball = box_1d(-1.0, 1.0, -0.5, 0.5, 0.01);
  const Reflection refl{{1.0, 0.0}, {0.0, 0.0}};
  const SolveResult res = solve_partial_ot(ball, 2.0);
  const DiscretePlan once = reflect_plan(ball, res.plan, refl);
  const DiscretePlan twice = reflect_plan(ball, once, refl);
  REQUIRE(twice.entries.size() == res.plan.entries.size());
  double cost_once = 0.0;
  for (const PlanEntry& e : once.entries)
    cost_once +=
        e.mass * std::pow(norm(ball.center(e.dst) - ball.center(e.src)), 2.0);
  CHECK(std::abs(cost_once - res.energy) <= 1e-9);
  for (std::size_t i = 0; i < twice.entries.size(); ++i) {
    CHECK(twice.entries[i].src == res.plan.entries[i].src);
    CHECK(twice.entries[i].dst == res.plan.entries[i].dst);
  }

  // off-center hyperplane: grid not symmetric
  CHECK_THROWS_AS(reflect_plan(ball, res.plan, Reflection{{1.0, 0.0}, {0.3, 0.0}}),
                  UnsupportedGeometryError);
}

TEST_CASE("symmetrization inequality for the energy") {
  for (int i = 0; i < 3; ++i) {
    Rng rng(sample_seed(77, i));
    const GridDensity rho = random_density_1d(rng, 0.01, true);
    const double base = solve_partial_ot(rho, 2.0).energy;
    const double med = median_offsets(rho)[0];
    const Reflection refl{{1.0, 0.0}, {med, 0.0}};
    const double snapped =
        rho.origin()[0] +
        rho.cell_width() *
            std::llround((med - rho.origin()[0]) / rho.cell_width());
    SolveOptions opt;
    opt.filter.mode = EdgeMode::Halfspace;
    opt.filter.nu = {1.0, 0.0};
    opt.filter.origin = {snapped, 0.0};
    double mean = 0.0;
    for (int side : {1, 2})
      mean += 0.5 *
              solve_partial_ot(symmetrize(rho, refl, side).density, 2.0, opt)
                  .energy;
    CHECK(base <= mean + 4 * std::pow(rho.cell_diameter(), 2.0) + 1e-9);
  }
}
