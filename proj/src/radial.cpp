#include "otmax/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "otmax/quadrature.hpp"
#include "otmax/symmetry.hpp"

namespace otmax {

namespace {

// Bilinear interpolation of cell-center values; 0 outside the grid.
double sample_grid(const GridDensity& rho, const Vec2& pt) {
  const double h = rho.cell_width();
  const double fx = (pt.x - rho.origin()[0]) / h - 0.5;
  const double fy = (pt.y - rho.origin()[1]) / h - 0.5;
  const int ix = (int)std::floor(fx);
  const int iy = (int)std::floor(fy);
  const double tx = fx - ix, ty = fy - iy;
  const int nx = rho.nx(), ny = rho.ny();
  auto at = [&](int jx, int jy) -> double {
    if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) return 0.0;
    return rho.value(jy * nx + jx);
  };
  return (1.0 - tx) * (1.0 - ty) * at(ix, iy) +
         tx * (1.0 - ty) * at(ix + 1, iy) +
         (1.0 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

}  // namespace

double RadialDensity::total_mass() const {
  double m = 0.0;
  for (const RadialRay& ray : rays) m += ray.weight * mass(ray.density);
  return m;
}

RadialDensity decompose(const GridDensity& rho, int n_rays) {
  if (rho.dim() != 2)
    throw UnsupportedGeometryError("decompose requires a 2D grid");
  if (n_rays < 4) throw std::invalid_argument("decompose: n_rays < 4");

  const std::vector<double> med = median_offsets(rho);
  const Vec2 center{med[0], med[1]};

  const double h = rho.cell_width();
  const double hr = 0.5 * h;
  // cover the whole grid from the center
  double rmax = 0.0;
  const double x0 = rho.origin()[0], y0 = rho.origin()[1];
  const double x1 = x0 + h * rho.nx(), y1 = y0 + h * rho.ny();
  for (double cx : {x0, x1})
    for (double cy : {y0, y1})
      rmax = std::max(rmax, norm(Vec2{cx, cy} - center));
  const int n_cells = (int)std::ceil(rmax / hr) + 1;

  RadialDensity rd;
  rd.dim = 2;
  rd.center = center;
  rd.rays.reserve(n_rays);
  const double q = 2.0 * std::numbers::pi / n_rays;
  for (int k = 0; k < n_rays; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_rays;
    const Vec2 omega{std::cos(theta), std::sin(theta)};
    std::vector<double> vals(n_cells);
    for (int i = 0; i < n_cells; ++i) {
      const double r = hr * (i + 0.5);
      vals[i] = std::clamp(
          sample_grid(rho, {center.x + r * omega.x, center.y + r * omega.y}),
          0.0, 1.0);
    }
    rd.rays.push_back(
        {theta, omega, q,
         Density1D(0.0, hr, std::move(vals), WeightedMeasure::power(1.0))});
  }
  return rd;
}

double radial_energy(const RadialDensity& rd, double p) {
  double total = 0.0;
  for (std::size_t k = 0; k < rd.rays.size(); ++k) {
    try {
      total += rd.rays[k].weight * sweep_rightward(rd.rays[k].density, p).energy;
    } catch (const CapacityError& e) {
      throw CapacityError(
          "radial_energy: ray " + std::to_string(k) + ": " + e.what(),
          e.required_extension);
    }
  }
  return total;
}

double ball_energy_nd(int dim, double p, double m) {
  if (dim < 1 || !(p > 1.0) || !(m > 0.0))
    throw std::invalid_argument("ball_energy_nd: need N >= 1, p > 1, m > 0");
  const double n = dim;
  const double wn = unit_ball_volume(dim);
  const double R = std::pow(m / wn, 1.0 / n);
  const double Rn = std::pow(R, n);
  auto f = [&](double r) {
    const double target = std::pow(std::pow(r, n) + Rn, 1.0 / n);
    return std::pow(target - r, p) * std::pow(r, n - 1.0);
  };
  return n * wn * integrate(f, 0.0, R, 1e-10);
}

double ray_length_bound(double r, double cos_theta, int dim) {
  const double c = std::pow(2.0, 1.0 / dim);
  const double disc = cos_theta * cos_theta - c * (2.0 - c);
  if (disc < 0.0) return 0.0;
  return r * (cos_theta + std::sqrt(disc)) / c;
}

StarShapeProfile star_shape_profile(const GridDensity& rho, int n_rays) {
  int mid = 0, support = 0;
  for (double v : rho.values()) {
    if (v > 0.05) {
      ++support;
      if (v < 0.95) ++mid;
    }
  }
  if (support == 0 || (double)mid / support > 0.05)
    throw std::domain_error(
        "star_shape_profile: input is not close to an indicator");

  const RadialDensity rd = decompose(rho, n_rays);
  StarShapeProfile out;
  out.angles.reserve(rd.rays.size());
  out.lengths.reserve(rd.rays.size());
  for (const RadialRay& ray : rd.rays) {
    const double m = mass(ray.density);
    out.angles.push_back(ray.angle);
    out.lengths.push_back(m > 0.0 ? volume_inverse(ray.density, m) : 0.0);
  }
  const int n = (int)out.lengths.size();
  for (int k = 0; k < n; ++k) {
    const int j = (k + 1) % n;
    const double chord =
        norm(rd.rays[j].omega - rd.rays[k].omega);
    if (chord <= 0.0) continue;
    out.holder = std::max(
        out.holder,
        std::abs(out.lengths[j] - out.lengths[k]) / (chord * chord));
  }
  return out;
}

}  // namespace otmax
