#pragma once

#include <vector>

#include "otmax/measure.hpp"

namespace otmax {

struct PlanEntry {
  int src = 0;   // source cell index
  int dst = 0;   // target cell index
  double mass = 0.0;
};

// Sparse transport plan between grid cells with cost |x_i - x_j|^p.
struct DiscretePlan {
  std::vector<PlanEntry> entries;
  double p = 2.0;
  double total_cost = 0.0;
};

enum class EdgeMode { All, Rightward, Halfspace };

// Restriction of the admissible edge set: Rightward keeps x_j >= x_i
// (1D auxiliary problem); Halfspace forbids pairs on opposite sides of the
// hyperplane through `origin` with normal `nu`.
struct EdgeFilter {
  EdgeMode mode = EdgeMode::All;
  Vec2 nu{1.0, 0.0};
  Vec2 origin{0.0, 0.0};
};

struct SolveOptions {
  EdgeFilter filter;
  bool prune = true;  // restrict edges to the proven transport-distance bound
};

struct SolveResult {
  DiscretePlan plan;
  double energy = 0.0;
  double certificate_gap = 0.0;  // worst dual-feasibility violation
  double max_distance = 0.0;
};

// Proven bound on the transport distance, (2/omega_N)^{1/N} m^{1/N}.
double transport_distance_bound(int dim, double m);

// Exact optimal partial transport on the grid: supplies rho_i * meas,
// sink capacities (1 - rho_j) * meas, all supply shipped. Successive
// shortest augmenting paths with node potentials over integerized masses;
// the returned potentials are checked as a dual certificate (reduced costs
// >= -1e-9, complementary slackness on used edges) and a CertificateError
// is thrown if the check fails.
SolveResult solve_partial_ot(const GridDensity& rho, double p,
                             const SolveOptions& options = {});

// Max |center_i - center_j| over entries with mass > 1e-12.
double max_transport_distance(const GridDensity& rho, const DiscretePlan& plan);

struct BallViolation {
  int entry_index = 0;
  double gap = 0.0;  // unsaturated capacity inside the ball
};

struct InteriorBallReport {
  std::vector<BallViolation> violations;
  double worst_gap = 0.0;
  int checked_pairs = 0;
};

// For each long-range entry (x -> y), verifies that the plan's second
// marginal saturates the capacity 1 - rho on the ball B_{|y-x|}(x)
// (aggregated tolerance 3 cell measures per ball).
InteriorBallReport interior_ball_check(const GridDensity& rho,
                                       const DiscretePlan& plan);

// Total plan mass on pairs strictly crossing the hyperplane through
// `origin` with normal `nu`, excluding pairs within one cell of it.
double crossing_mass(const GridDensity& rho, const DiscretePlan& plan,
                     Vec2 nu, Vec2 origin);

}  // namespace otmax
