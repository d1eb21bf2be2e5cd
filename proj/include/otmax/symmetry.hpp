#pragma once

#include <vector>

#include "otmax/flow.hpp"
#include "otmax/measure.hpp"

namespace otmax {

// Reflection across the hyperplane through `origin` with unit normal `nu`:
// F(x) = x - 2 <x - origin, nu> nu. An involution and an isometry.
struct Reflection {
  Vec2 nu{1.0, 0.0};
  Vec2 origin{0.0, 0.0};

  Vec2 apply(const Vec2& x) const {
    const double s = dot(x - origin, nu);
    return {x.x - 2.0 * s * nu.x, x.y - 2.0 * s * nu.y};
  }
};

// Per-axis offsets c_i such that the half-spaces {<x, e_i> < c_i} and
// {<x, e_i> > c_i} each carry half the mass (sub-cell linear interpolation).
// Requires unit mass within 1e-9.
std::vector<double> median_offsets(const GridDensity& rho);

struct SymmetrizeResult {
  GridDensity density;
  double clamp_mass = 0.0;  // mass removed where rho + mirror exceeded 1
};

// Keeps rho on the chosen half-space of the reflection (side 1 = below the
// hyperplane along its axis, side 2 = above) and mirrors it to the other
// side. The reflection must be axis-aligned; its offset is snapped to the
// nearest cell boundary and the grid is extended to hold the mirror image.
SymmetrizeResult symmetrize(const GridDensity& rho, const Reflection& refl,
                            int side);

// Pushes a plan forward under (x, y) -> (F(x), F(y)). The grid must be
// symmetric under the reflection; cost is preserved exactly.
DiscretePlan reflect_plan(const GridDensity& rho, const DiscretePlan& plan,
                          const Reflection& refl);

}  // namespace otmax
