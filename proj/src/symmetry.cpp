#include "otmax/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otmax {

namespace {

// 0 for +/-e_x, 1 for +/-e_y; throws if the normal is not axis-aligned.
int reflection_axis(const GridDensity& rho, const Reflection& refl) {
  const double ax = std::abs(refl.nu.x), ay = std::abs(refl.nu.y);
  if (std::abs(ax - 1.0) < 1e-9 && ay < 1e-9) return 0;
  if (std::abs(ay - 1.0) < 1e-9 && ax < 1e-9) {
    if (rho.dim() < 2)
      throw UnsupportedGeometryError("reflection axis outside the grid dim");
    return 1;
  }
  throw UnsupportedGeometryError("reflection must be axis-aligned");
}

double axis_coord(const Reflection& refl, int axis) {
  return axis == 0 ? refl.origin.x : refl.origin.y;
}

}  // namespace

std::vector<double> median_offsets(const GridDensity& rho) {
  const double m = mass(rho);
  if (std::abs(m - 1.0) > 1e-9)
    throw std::domain_error("median_offsets requires unit mass");
  const double h = rho.cell_width();
  const double meas = rho.cell_measure();
  const int nx = rho.nx(), ny = rho.ny();

  std::vector<double> offsets(rho.dim(), 0.0);
  for (int axis = 0; axis < rho.dim(); ++axis) {
    const int n_slices = axis == 0 ? nx : ny;
    std::vector<double> slice(n_slices, 0.0);
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        slice[axis == 0 ? ix : iy] += rho.value(iy * nx + ix) * meas;

    const double half = 0.5 * m;
    double cum = 0.0;
    int i = 0;
    while (i < n_slices && cum + slice[i] < half) cum += slice[i++];
    double frac = 0.5;
    if (i < n_slices && slice[i] > 0.0) frac = (half - cum) / slice[i];
    offsets[axis] = rho.origin()[axis] + h * (std::min(i, n_slices - 1) + frac);
  }
  return offsets;
}

SymmetrizeResult symmetrize(const GridDensity& rho, const Reflection& refl,
                            int side) {
  if (side != 1 && side != 2)
    throw std::invalid_argument("symmetrize: side must be 1 or 2");
  const int axis = reflection_axis(rho, refl);
  const double h = rho.cell_width();
  const int n = axis == 0 ? rho.nx() : rho.ny();
  // snap the hyperplane to the nearest cell boundary
  int b = (int)std::llround((axis_coord(refl, axis) - rho.origin()[axis]) / h);
  b = std::clamp(b, 0, n);

  // new index range along the axis, in old-index coordinates
  const int lo = side == 1 ? 0 : std::min(0, 2 * b - n);
  const int hi = side == 1 ? std::max(n, 2 * b) : n;
  const int n_new = hi - lo;

  const int nx = rho.nx(), ny = rho.ny();
  const int nx_new = axis == 0 ? n_new : nx;
  const int ny_new = axis == 1 ? n_new : ny;
  std::array<double, 2> orig = rho.origin();
  orig[axis] += lo * h;

  std::vector<double> out((std::size_t)nx_new * ny_new, 0.0);
  double clamp_mass = 0.0;
  const double meas = rho.cell_measure();
  for (int iy = 0; iy < ny_new; ++iy) {
    for (int ix = 0; ix < nx_new; ++ix) {
      const int j = (axis == 0 ? ix : iy) + lo;  // old index along the axis
      const int other = axis == 0 ? iy : ix;
      auto sample = [&](int jj) -> double {
        if (jj < 0 || jj >= n) return 0.0;
        const int sx = axis == 0 ? jj : other;
        const int sy = axis == 0 ? other : jj;
        return rho.value(sy * nx + sx);
      };
      double v = 0.0;
      const bool kept = side == 1 ? j < b : j >= b;
      if (kept) v += sample(j);
      const int jm = 2 * b - 1 - j;  // mirror cell
      const bool mirror_kept = side == 1 ? jm < b : jm >= b;
      if (!kept && mirror_kept) v += sample(jm);
      if (v > 1.0) {
        clamp_mass += (v - 1.0) * meas;
        v = 1.0;
      }
      out[(std::size_t)iy * nx_new + ix] = v;
    }
  }
  return {GridDensity(rho.dim(), h, orig, {nx_new, ny_new}, std::move(out)),
          clamp_mass};
}

DiscretePlan reflect_plan(const GridDensity& rho, const DiscretePlan& plan,
                          const Reflection& refl) {
  const int axis = reflection_axis(rho, refl);
  const double h = rho.cell_width();
  const int n = axis == 0 ? rho.nx() : rho.ny();
  const double mid = rho.origin()[axis] + 0.5 * h * n;
  if (std::abs(axis_coord(refl, axis) - mid) > 1e-9)
    throw UnsupportedGeometryError("reflect_plan: grid not symmetric");

  const int nx = rho.nx();
  auto mirror = [&](int idx) {
    int ix = idx % nx, iy = idx / nx;
    if (axis == 0)
      ix = n - 1 - ix;
    else
      iy = n - 1 - iy;
    return iy * nx + ix;
  };
  DiscretePlan out;
  out.p = plan.p;
  out.total_cost = plan.total_cost;
  out.entries.reserve(plan.entries.size());
  for (const PlanEntry& e : plan.entries)
    out.entries.push_back({mirror(e.src), mirror(e.dst), e.mass});
  std::sort(out.entries.begin(), out.entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
            });
  return out;
}

}  // namespace otmax
