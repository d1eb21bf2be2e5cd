#include "otmax/line.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "otmax/quadrature.hpp"

namespace otmax {

SweepResult sweep_rightward(const Density1D& rho, double p,
                            bool allow_extension) {
  const double h = rho.cell_width();
  const auto& w = rho.measure();

  // Rightward feasibility is a suffix condition: for every cell j the mass
  // emitted in [j, end) must fit into the free capacity of [j, end). Extra
  // empty cells on the right raise every suffix capacity, so the needed
  // extension is the worst suffix deficit.
  double suffix = 0.0, deficit = 0.0;
  for (int i = rho.size() - 1; i >= 0; --i) {
    suffix += (2.0 * rho.value(i) - 1.0) * rho.cell_measure(i);
    deficit = std::max(deficit, suffix);
  }
  int extra = 0;
  if (deficit > 0.0) {
    const double v_hi = w.primitive(rho.x_hi());
    const double x_need = w.inverse_primitive(v_hi + deficit);
    extra = (int)std::ceil((x_need - rho.x_hi()) / h) + 1;
    if (!allow_extension)
      throw CapacityError("sweep_rightward: domain capacity exhausted",
                          extra * h);
  }
  std::vector<double> values = rho.values();
  values.resize(values.size() + extra, 0.0);
  Density1D ext(rho.x_lo(), h, values, w);

  std::vector<double> measures(ext.size());
  for (int i = 0; i < ext.size(); ++i) measures[i] = ext.cell_measure(i);
  const QuantizedCells q = quantize_cells(ext.values(), measures);

  struct Pending {
    std::int64_t units;
    int cell;
  };
  std::deque<Pending> queue;
  MonotonePlan plan;
  plan.p = p;
  double energy = 0.0;

  for (int j = 0; j < ext.size(); ++j) {
    if (q.supply[j] > 0) queue.push_back({q.supply[j], j});
    std::int64_t cap = q.capacity[j];
    while (cap > 0 && !queue.empty()) {
      Pending& front = queue.front();
      const std::int64_t moved = std::min(front.units, cap);
      const double mmass = (double)moved / (double)kMassScale;
      const double src = ext.cell_mid(front.cell);
      const double dst = ext.cell_mid(j);
      plan.parcels.push_back({src, dst, mmass});
      energy += mmass * std::pow(std::abs(dst - src), p);
      cap -= moved;
      front.units -= moved;
      if (front.units == 0) queue.pop_front();
    }
  }
  if (!queue.empty())
    throw CapacityError("sweep_rightward: internal capacity accounting", h);
  return {std::move(plan), energy, extra * h, std::move(ext)};
}

double interval_distance(double v, double m, const WeightedMeasure& w) {
  if (w.is_constant()) return m;
  const double x = w.inverse_primitive(v);
  return w.inverse_primitive(w.primitive(x) + m) - x;
}

VolumeProfile distance_profile(const Density1D& rho, const MonotonePlan& plan,
                               int n_samples) {
  const double m = mass(rho);
  VolumeProfile out;
  if (m <= 0.0 || n_samples <= 0) return out;
  // cumulative parcel mass in FIFO (= source) order
  std::vector<double> cum(plan.parcels.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < plan.parcels.size(); ++k) {
    acc += plan.parcels[k].mass;
    cum[k] = acc;
  }
  for (int j = 0; j < n_samples; ++j) {
    const double v = m * (j + 0.5) / n_samples;
    const auto it = std::lower_bound(cum.begin(), cum.end(), v);
    const std::size_t k =
        it == cum.end() ? plan.parcels.size() - 1 : (std::size_t)(it - cum.begin());
    const Parcel& par = plan.parcels[k];
    out.volumes.push_back(v);
    out.positions.push_back(volume_inverse(rho, v));
    out.distances.push_back(std::abs(par.target - par.source));
  }
  return out;
}

DominationReport profile_dominates(const Density1D& rho, double p,
                                   int n_samples) {
  const double m = mass(rho);
  SweepResult sw = sweep_rightward(rho, p);
  DominationReport rep;
  rep.profile = distance_profile(sw.density, sw.plan, n_samples);
  rep.reference.reserve(rep.profile.volumes.size());
  const double tol = 2.0 * rho.cell_width();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rep.profile.volumes.size(); ++j) {
    const double d = interval_distance(rep.profile.volumes[j], m, rho.measure());
    rep.reference.push_back(d);
    worst = std::max(worst, rep.profile.distances[j] - d);
  }
  rep.max_violation = rep.profile.volumes.empty() ? 0.0 : worst;
  rep.dominates = rep.max_violation <= tol;
  return rep;
}

double interval_energy(double m, const WeightedMeasure& w, double p) {
  if (m <= 0.0) return 0.0;
  if (w.is_constant()) return std::pow(m, p + 1.0);
  // substitute v = m u^{k+1} to remove the endpoint singularity
  const double k = w.exponent;
  auto f = [&](double u) {
    const double v = m * std::pow(u, k + 1.0);
    const double d = interval_distance(v, m, w);
    return std::pow(d, p) * m * (k + 1.0) * std::pow(u, k);
  };
  return integrate(f, 0.0, 1.0, 1e-10);
}

double ball_energy_1d(double p) { return std::pow(2.0, -p); }

SharpExample sharp_example(double eps, double p, double cell_width) {
  if (!(eps > 0.0 && eps < 0.25))
    throw std::domain_error("sharp_example requires 0 < eps < 1/4");
  const double energy =
      std::pow(2.0, -p) -
      4.0 * eps * (std::pow(2.0, -p) - std::pow(0.5 - eps, p));

  // Discretize by exact cell overlap with the three support intervals, on a
  // domain wide enough to leave oracle capacity on both sides.
  const double h = cell_width;
  const double lo = -1.6, hi = 1.6;
  const int n = (int)std::llround((hi - lo) / h);
  const double segs[3][2] = {{-0.5 - eps, -0.5},
                             {-0.5 + eps, 0.5 - eps},
                             {0.5, 0.5 + eps}};
  std::vector<double> values(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = lo + i * h, b = a + h;
    double cover = 0.0;
    for (const auto& s : segs)
      cover += std::max(0.0, std::min(b, s[1]) - std::max(a, s[0]));
    values[i] = std::clamp(cover / h, 0.0, 1.0);
  }
  GridDensity density(1, h, {lo, 0.0}, {n, 1}, std::move(values));
  return {std::move(density), energy, 4.0 * eps};
}

}  // namespace otmax
