#pragma once

#include <vector>

#include "otmax/measure.hpp"

namespace otmax {

// One parcel of the rightward monotone map: mass moved from the source
// cell midpoint to the target cell midpoint.
struct Parcel {
  double source = 0.0;
  double target = 0.0;
  double mass = 0.0;
};

// Rightward 1D plan; parcels sorted by source are also sorted by target.
struct MonotonePlan {
  std::vector<Parcel> parcels;
  double p = 2.0;
};

struct SweepResult {
  MonotonePlan plan;
  double energy = 0.0;                 // sum mass * |target - source|^p
  double domain_extension = 0.0;       // extra length appended on the right
  Density1D density;                   // input density on the (extended) grid
};

// Exact rightward solver: sweeps cells left to right with a FIFO queue of
// pending parcels. Each cell first enqueues its emitted mass, then absorbs
// queue mass up to its free capacity, so capacity between a parcel's source
// and target is saturated. Masses are integerized with quantize_cells so
// the result is directly comparable with the flow oracle.
//
// With allow_extension the half-line domain is grown on the right until
// capacity suffices; otherwise a CapacityError reports the minimal
// extension required.
SweepResult sweep_rightward(const Density1D& rho, double p,
                            bool allow_extension = true);

// Transport distance of chi_I under the rightward problem, as a function of
// cumulative volume: d(v) solves gamma([V^{-1}(v), V^{-1}(v) + d]) = m.
double interval_distance(double v, double m, const WeightedMeasure& w);

// d_rho(v_j) at n equispaced volumes in (0, m), from a sweep plan.
VolumeProfile distance_profile(const Density1D& rho, const MonotonePlan& plan,
                               int n_samples);

struct DominationReport {
  bool dominates = false;
  double max_violation = 0.0;  // max over samples of d_rho - d (signed)
  VolumeProfile profile;       // distances = d_rho; see reference below
  std::vector<double> reference;  // d at the same volumes
};

// Checks d_rho <= d + tol on a shared volume grid (tol = 2 cell widths).
DominationReport profile_dominates(const Density1D& rho, double p,
                                   int n_samples = 256);

// W_p^p(chi_I) for I = [0, l] with gamma(I) = m: integral of d(v)^p over
// [0, m]. Closed form m^{p+1} for constant weight, adaptive quadrature
// (relative tolerance 1e-10) otherwise.
double interval_energy(double m, const WeightedMeasure& w, double p);

// W_p^p of the unit-mass 1D ball: 2^{-p}.
double ball_energy_1d(double p);

struct SharpExample {
  GridDensity density;   // on a 1D grid wide enough for oracle solves
  double energy = 0.0;     // closed form 2^{-p} - 4 eps (2^{-p} - (1/2-eps)^p)
  double asymmetry = 0.0;  // 4 eps
};

// The near-ball density chi_[-1/2-eps,-1/2] + chi_[-1/2+eps,1/2-eps] +
// chi_[1/2,1/2+eps] together with its closed-form energy and asymmetry.
// Requires 0 < eps < 1/4.
SharpExample sharp_example(double eps, double p, double cell_width = 2e-3);

}  // namespace otmax
