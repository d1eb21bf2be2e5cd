#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "otmax/lab.hpp"
#include "otmax/line.hpp"

using namespace otmax;

TEST_CASE("sweep of the unit interval is the unit shift") {
  const double h = 1e-3;
  std::vector<double> ones(1000, 1.0);
  const SweepResult sw = sweep_rightward(Density1D(0.0, h, ones), 2.0);
  CHECK(sw.energy == doctest::Approx(1.0).epsilon(1e-9));
  for (const Parcel& par : sw.plan.parcels) {
    CHECK(par.target >= par.source);
    CHECK(par.target - par.source == doctest::Approx(1.0).epsilon(1e-9));
  }
  // p does not matter for a pure shift
  CHECK(sweep_rightward(Density1D(0.0, h, ones), 3.5).energy ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sweep deposits in place when there is room") {
  std::vector<double> half(200, 0.5);
  const SweepResult sw = sweep_rightward(Density1D(0.0, 0.01, half), 2.0);
  CHECK(sw.energy == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sweep on the r-weighted ray ends at the 2^(1/2) boundary") {
  const double h = 1e-3;
  std::vector<double> vals(2000, 0.0);
  for (int i = 0; i < 1000; ++i) vals[i] = 1.0;  // chi_[0,1]
  const SweepResult sw = sweep_rightward(
      Density1D(0.0, h, vals, WeightedMeasure::power(1.0)), 2.0);
  double max_target = 0.0;
  for (const Parcel& par : sw.plan.parcels)
    max_target = std::max(max_target, par.target);
  CHECK(max_target == doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
}

TEST_CASE("sweep reports the minimal domain extension") {
  std::vector<double> ones(100, 1.0);  // chi_[0,1] with no room at all
  const Density1D rho(0.0, 0.01, ones);
  CHECK_THROWS_AS(sweep_rightward(rho, 2.0, false), CapacityError);
  try {
    sweep_rightward(rho, 2.0, false);
  } catch (const CapacityError& e) {
    CHECK(e.required_extension >= 1.0 - 0.05);
    CHECK(e.required_extension <= 1.0 + 0.05);
  }
  const SweepResult sw = sweep_rightward(rho, 2.0, true);
  CHECK(sw.domain_extension >= 1.0 - 0.05);
  CHECK(sw.energy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("FIFO parcels are monotone and marginal-consistent") {
  Rng rng(17);
  const Density1D rho =
      random_line_density(rng, 2e-3, WeightedMeasure::power(1.0), true);
  const SweepResult sw = sweep_rightward(rho, 2.0);
  for (std::size_t i = 1; i < sw.plan.parcels.size(); ++i) {
    CHECK(sw.plan.parcels[i].source >= sw.plan.parcels[i - 1].source);
    CHECK(sw.plan.parcels[i].target >= sw.plan.parcels[i - 1].target);
  }
  double shipped = 0.0;
  for (const Parcel& par : sw.plan.parcels) {
    CHECK(par.target >= par.source);
    shipped += par.mass;
  }
  CHECK(shipped == doctest::Approx(mass(rho)).epsilon(1e-9));
}

TEST_CASE("interval_distance closed forms") {
  CHECK(interval_distance(0.3, 0.7, WeightedMeasure::constant()) ==
        doctest::Approx(0.7));
  // w(r) = r, m = 1/2: d(v) = sqrt(2v+1) - sqrt(2v)
  const WeightedMeasure w = WeightedMeasure::power(1.0);
  for (double v : {0.0, 0.1, 0.3}) {
    CHECK(interval_distance(v, 0.5, w) ==
          doctest::Approx(std::sqrt(2 * v + 1) - std::sqrt(2 * v))
              .epsilon(1e-12));
  }
}

TEST_CASE("distance profile of the unit interval is constant") {
  std::vector<double> ones(500, 1.0);
  const Density1D rho(0.0, 2e-3, ones);
  const SweepResult sw = sweep_rightward(rho, 2.0);
  const VolumeProfile prof = distance_profile(sw.density, sw.plan, 64);
  REQUIRE(prof.volumes.size() == 64);
  for (std::size_t j = 0; j < prof.distances.size(); ++j) {
    CHECK(prof.distances[j] == doctest::Approx(1.0).epsilon(1e-6));
    if (j > 0) {
      CHECK(prof.volumes[j] > prof.volumes[j - 1]);
      CHECK(prof.positions[j] >= prof.positions[j - 1]);
    }
  }
}

TEST_CASE("interval profile dominates its own and flat densities") {
  std::vector<double> ones(500, 1.0);
  const DominationReport self =
      profile_dominates(Density1D(0.0, 2e-3, ones), 2.0);
  CHECK(self.dominates);
  CHECK(std::abs(self.max_violation) <= 2 * 2e-3 + 1e-9);

  std::vector<double> half(1000, 0.5);
  const DominationReport flat =
      profile_dominates(Density1D(0.0, 2e-3, half), 2.0);
  CHECK(flat.dominates);
  CHECK(flat.max_violation <= -1.0 + 1e-6);  // d_rho = 0 vs d = 1
}

TEST_CASE("random densities never beat the interval profile") {
  for (int i = 0; i < 10; ++i) {
    Rng rng(sample_seed(99, i));
    const WeightedMeasure w = i % 2 == 0 ? WeightedMeasure::constant()
                                         : WeightedMeasure::power(1.0);
    const Density1D rho = random_line_density(rng, 2e-3, w, i >= 5);
    const DominationReport rep = profile_dominates(rho, 2.0);
    CHECK(rep.dominates);
  }
}

TEST_CASE("interval_energy closed forms and quadrature") {
  CHECK(interval_energy(1.0, WeightedMeasure::constant(), 2.0) ==
        doctest::Approx(1.0));
  CHECK(interval_energy(0.5, WeightedMeasure::constant(), 2.0) ==
        doctest::Approx(0.125));
  // quadrature against a fine sweep on the r-weighted ray
  const double h = 2e-4;
  const int n = (int)std::llround(1.0 / h);
  std::vector<double> vals(2 * n, 0.0);
  for (int i = 0; i < n; ++i) vals[i] = 1.0;
  const SweepResult sw = sweep_rightward(
      Density1D(0.0, h, vals, WeightedMeasure::power(1.0)), 2.0);
  const double quad = interval_energy(0.5, WeightedMeasure::power(1.0), 2.0);
  CHECK(quad == doctest::Approx(sw.energy).epsilon(5e-4));
}

TEST_CASE("maximality of the interval under the rightward functional") {
  // random densities on the half-line never exceed the interval energy
  for (int i = 0; i < 8; ++i) {
    Rng rng(sample_seed(123, i));
    const WeightedMeasure w = i % 2 == 0 ? WeightedMeasure::constant()
                                         : WeightedMeasure::power(1.0);
    const Density1D rho = random_line_density(rng, 2e-3, w, i >= 4);
    const double e = sweep_rightward(rho, 2.0).energy;
    const double ref = interval_energy(mass(rho), w, 2.0);
    CHECK(e <= ref + 0.05 * ref + 0.05);
  }
}

TEST_CASE("ball energy in 1D") {
  CHECK(ball_energy_1d(2.0) == 0.25);
  CHECK(ball_energy_1d(3.0) == 0.125);
  CHECK(ball_energy_1d(1.0 + 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("sharp example closed forms") {
  const SharpExample tiny = sharp_example(1e-6, 2.0);
  CHECK(tiny.energy == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(tiny.asymmetry == doctest::Approx(4e-6));

  const SharpExample ex = sharp_example(0.05, 2.0);
  CHECK(ex.energy == doctest::Approx(0.25 - 0.2 * (0.25 - 0.2025))
                         .epsilon(1e-12));
  CHECK(ex.asymmetry == doctest::Approx(0.2));
  CHECK(mass(ex.density) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(sharp_example(0.3, 2.0), std::domain_error);
  CHECK_THROWS_AS(sharp_example(0.0, 2.0), std::domain_error);
}
