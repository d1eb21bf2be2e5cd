#pragma once

#include <vector>

#include "otmax/line.hpp"
#include "otmax/measure.hpp"

namespace otmax {

// Per-ray restriction rho^omega(r) = rho(center + r*omega) on the
// half-line with reference weight r^(N-1), plus its sphere quadrature
// weight q_omega. Sum of the weights equals the unit-sphere measure.
struct RadialRay {
  double angle = 0.0;
  Vec2 omega{1.0, 0.0};
  double weight = 0.0;
  Density1D density;
};

struct RadialDensity {
  int dim = 2;
  Vec2 center{0.0, 0.0};
  std::vector<RadialRay> rays;

  double total_mass() const;  // sum q_omega * mass(rho^omega)
};

// Samples a 2D density along n_rays equispaced directions from the
// coordinate-median point, by bilinear interpolation onto a radial grid of
// width cell_width/2. Sphere weights are uniform (2*pi/n_rays).
RadialDensity decompose(const GridDensity& rho, int n_rays);

// Sum over rays of q_omega times the rightward sweep energy of rho^omega on
// the power-weighted half-line. Equals the transport energy when the
// optimal plan is radial and outward along rays (star-shaped densities);
// in general it is an upper bound.
double radial_energy(const RadialDensity& rd, double p);

// Transport energy of the N-dimensional ball of mass m under the explicit
// radial map r -> (r^N + R^N)^{1/N}:
//   N * omega_N * int_0^R ((r^N + R^N)^{1/N} - r)^p r^{N-1} dr,
// omega_N R^N = m, adaptive quadrature to relative tolerance 1e-10.
double ball_energy_nd(int dim, double p, double m);

// Lower bound on the star-shaped radius along omega implied by the ball
// already reaching radius r along nu, from the quadratic
// c^2 t^2 - 2 c cos_theta r t + c(2-c) r^2 = 0 with c = 2^{1/N}:
// returns r * (cos_theta + sqrt(cos_theta^2 - c(2-c))) / c, or 0 when the
// discriminant is negative (vacuous bound).
double ray_length_bound(double r, double cos_theta, int dim);

struct StarShapeProfile {
  std::vector<double> angles;
  std::vector<double> lengths;  // l_omega: radius holding the full ray mass
  double holder = 0.0;  // max |l_nu - l_omega| / |nu - omega|^2, adjacent rays
};

// Star-shaped radius per ray for an (approximate) indicator density, with
// the second-order difference quotient over adjacent rays. Rejects inputs
// whose fraction of intermediate cell values (0.05, 0.95) exceeds 5%.
StarShapeProfile star_shape_profile(const GridDensity& rho, int n_rays);

}  // namespace otmax
