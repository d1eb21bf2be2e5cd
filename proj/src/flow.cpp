#include "otmax/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>

namespace otmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDualTol = 1e-9;

struct FlowEdge {
  int src = 0;   // source-list index
  int snk = 0;   // sink-list index
  std::int64_t flow = 0;
  double cost = 0.0;
  std::int64_t cost_i = 0;
};

// Exact solver for 1D instances with unrestricted transport direction.
// For convex costs |x - y|^p the optimal plan is monotone (non-crossing),
// so the only freedom is the cumulative used-capacity profile G: cell j
// contributes G[j] - G[j-1] units. Writing the monotone-coupling cost as a
// function of G makes it separable, Sum_j chi_j(G[j]) + const, with each
// chi_j convex, under the chain constraints 0 <= G[j] - G[j-1] <= cap[j].
// That is solved exactly by a marginal-cost recursion on the integerized
// masses. Kantorovich potentials are then chained along the plan support
// and checked by the same dual certificate the general solver uses; on any
// failure the caller falls back to the general path.
std::optional<SolveResult> solve_line_monotone(
    int n, const QuantizedCells& q, const std::vector<double>& off_cost,
    const std::vector<double>& off_dist, double bound, int win) {
  const int ox = n - 1;
  const std::int64_t M = q.total_supply;
  std::vector<std::int64_t> cumS(n + 1, 0), cumC(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    cumS[i + 1] = cumS[i] + q.supply[i];
    cumC[i + 1] = cumC[i] + q.capacity[i];
  }
  // cell holding the (g+1)-th unit of supply in left-to-right order
  auto cell_of_unit = [&](std::int64_t g) {
    return (int)(std::upper_bound(cumS.begin() + 1, cumS.end(), g) -
                 (cumS.begin() + 1));
  };

  // V_j(g) = least coupling cost of serving the first g supply units with
  // capacity from cells 0..j (up to a constant). delta evaluates the
  // discrete derivative V_j(g+1) - V_j(g) by walking the chain downward:
  // at each level the inner minimum over G[j-1] is clamped against the
  // previous level's minimizer.
  std::vector<std::int64_t> xstar(n, 0);
  auto delta = [&](int j, std::int64_t g) -> double {
    double acc = 0.0;
    while (true) {
      if (g + 1 > cumC[j + 1]) return kInf;
      if (j + 1 < n) {
        const int i = cell_of_unit(g);
        acc += off_cost[j - i + ox] - off_cost[j + 1 - i + ox];
      }
      const std::int64_t c = q.capacity[j];
      const std::int64_t xp = j == 0 ? 0 : xstar[j - 1];
      if (xp <= g - c) {  // lower edge of the window binds
        g -= c;
        --j;
        continue;
      }
      if (xp >= g + 1) {  // upper edge binds
        --j;
        continue;
      }
      return acc;  // previous minimizer lies inside the window
    }
  };
  for (int j = 0; j + 1 < n; ++j) {
    std::int64_t lo = 0, hi = std::min(M, cumC[j + 1]);
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (delta(j, mid) >= 0.0)
        hi = mid;
      else
        lo = mid + 1;
    }
    xstar[j] = lo;
  }
  std::vector<std::int64_t> G(n);
  G[n - 1] = M;
  for (int j = n - 2; j >= 0; --j)
    G[j] = std::clamp(xstar[j],
                      std::max<std::int64_t>(0, G[j + 1] - q.capacity[j + 1]),
                      std::min(G[j + 1], cumC[j + 1]));

  // monotone coupling of cumulative supply against the chosen usage
  SolveResult out;
  {
    int i = 0;
    for (int j = 0; j < n; ++j) {
      std::int64_t lo = j ? G[j - 1] : 0;
      const std::int64_t hi = G[j];
      while (lo < hi) {
        while (cumS[i + 1] <= lo) ++i;
        const std::int64_t seg = std::min(hi, cumS[i + 1]) - lo;
        out.plan.entries.push_back({i, j, (double)seg / (double)kMassScale});
        lo += seg;
      }
    }
  }
  for (const PlanEntry& e : out.plan.entries) {
    out.plan.total_cost += e.mass * off_cost[e.dst - e.src + ox];
    out.max_distance = std::max(out.max_distance, off_dist[e.dst - e.src + ox]);
  }
  out.energy = out.plan.total_cost;

  // Kantorovich potentials: chain u - v = cost along the support, one
  // offset per support component. Slack sinks pin their component's v to
  // zero; the remaining offsets come from relaxing the admissible-pair
  // difference constraints. The certificate below is the sole arbiter.
  std::vector<double> u(n, 0.0), v(n, 0.0);
  std::vector<int> cu(n, -1), cv(n, -1);
  int K = 0;
  for (const PlanEntry& e : out.plan.entries) {
    const double c = off_cost[e.dst - e.src + ox];
    if (cu[e.src] < 0 && cv[e.dst] < 0) {
      cu[e.src] = cv[e.dst] = K++;
      v[e.dst] = 0.0;
      u[e.src] = c;
    } else if (cu[e.src] >= 0 && cv[e.dst] < 0) {
      cv[e.dst] = cu[e.src];
      v[e.dst] = u[e.src] - c;
    } else if (cv[e.dst] >= 0 && cu[e.src] < 0) {
      cu[e.src] = cv[e.dst];
      u[e.src] = v[e.dst] + c;
    }
  }
  std::vector<std::int64_t> used(n, 0);
  for (int j = 0; j < n; ++j) used[j] = G[j] - (j ? G[j - 1] : 0);
  const double unset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pinv(K, unset), low(K, -kInf);
  for (int j = 0; j < n; ++j) {
    if (cv[j] < 0) continue;
    low[cv[j]] = std::max(low[cv[j]], -v[j]);
    if (used[j] < q.capacity[j] && std::isnan(pinv[cv[j]]))
      pinv[cv[j]] = -v[j];
  }
  // difference constraints d[k] <= d[l] + sigma over component pairs; the
  // extra node K stands for everything with v fixed at zero
  std::unordered_map<std::int64_t, double> sig;
  for (int a = 0; a < n; ++a) {
    if (q.supply[a] == 0) continue;
    const int k = cu[a];
    for (int j = std::max(0, a - win); j <= std::min(n - 1, a + win); ++j) {
      if (q.capacity[j] == 0 || off_dist[j - a + ox] > bound) continue;
      const int l = cv[j] < 0 ? K : cv[j];
      if (l == k) continue;
      const double s = off_cost[j - a + ox] - u[a] + (cv[j] < 0 ? 0.0 : v[j]);
      auto [it, fresh] = sig.emplace((std::int64_t)l * (K + 1) + k, s);
      if (!fresh && s < it->second) it->second = s;
    }
  }
  std::vector<double> d(K + 1, kInf);
  d[K] = 0.0;
  for (int k = 0; k < K; ++k)
    if (!std::isnan(pinv[k])) d[k] = pinv[k];
  for (int round = 0; round <= K + 1; ++round) {
    bool changed = false;
    for (const auto& [key, s] : sig) {
      const int l = (int)(key / (K + 1)), k = (int)(key % (K + 1));
      if (d[l] < kInf && d[l] + s < d[k] - 1e-15) {
        d[k] = d[l] + s;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<double> off(K, 0.0);
  for (int k = 0; k < K; ++k) {
    if (!std::isnan(pinv[k]))
      off[k] = pinv[k];
    else if (d[k] < kInf)
      off[k] = d[k];
    else
      off[k] = low[k] > -kInf ? low[k] : 0.0;
  }
  for (int i = 0; i < n; ++i) {
    if (cu[i] >= 0) u[i] += off[cu[i]];
    if (cv[i] >= 0) v[i] += off[cv[i]];
  }

  // dual certificate: admissible-pair feasibility, support slackness,
  // nonnegative sink prices, zero price on slack capacity
  double gap = 0.0;
  for (int a = 0; a < n; ++a) {
    if (q.supply[a] == 0) continue;
    for (int j = std::max(0, a - win); j <= std::min(n - 1, a + win); ++j) {
      if (q.capacity[j] == 0 || off_dist[j - a + ox] > bound) continue;
      gap = std::max(gap, u[a] - v[j] - off_cost[j - a + ox]);
    }
  }
  for (const PlanEntry& e : out.plan.entries)
    gap = std::max(gap,
                   std::abs(u[e.src] - v[e.dst] - off_cost[e.dst - e.src + ox]));
  for (int j = 0; j < n; ++j) {
    if (q.capacity[j] == 0) continue;
    if (cv[j] >= 0) gap = std::max(gap, -v[j]);
    if (used[j] < q.capacity[j]) gap = std::max(gap, std::abs(v[j]));
  }
  if (gap > kDualTol) return std::nullopt;
  out.certificate_gap = gap;
  return out;
}

}  // namespace

double transport_distance_bound(int dim, double m) {
  return std::pow(2.0 * m / unit_ball_volume(dim), 1.0 / dim);
}

SolveResult solve_partial_ot(const GridDensity& rho, double p,
                             const SolveOptions& options) {
  const int ncells = rho.cell_count();
  if (ncells > 5000)
    throw std::invalid_argument("solve_partial_ot: grid beyond desk scale");
  const double meas = rho.cell_measure();
  const double h = rho.cell_width();
  const int nx = rho.nx(), ny = rho.ny();
  const double total_mass = mass(rho);

  std::vector<double> measures(ncells, meas);
  const QuantizedCells q = quantize_cells(rho.values(), measures);

  std::vector<int> sources, sinks;
  std::vector<int> sink_of_cell(ncells, -1);
  for (int i = 0; i < ncells; ++i) {
    if (q.supply[i] > 0) sources.push_back(i);
    if (q.capacity[i] > 0) {
      sink_of_cell[i] = (int)sinks.size();
      sinks.push_back(i);
    }
  }
  const int S = (int)sources.size();
  const int T = (int)sinks.size();
  const int n_nodes = S + T;

  std::int64_t cap_total = 0;
  for (int j : sinks) cap_total += q.capacity[j];
  if (cap_total < q.total_supply)
    throw CapacityError("solve_partial_ot: total capacity short",
                        (double)(q.total_supply - cap_total) / kMassScale);

  const double bound =
      options.prune
          ? transport_distance_bound(rho.dim(), total_mass) +
                2.0 * rho.cell_diameter()
          : kInf;
  const int win = options.prune
                      ? (int)std::ceil(bound / h) + 1
                      : std::max(nx, ny);

  std::vector<Vec2> centers(ncells);
  for (int i = 0; i < ncells; ++i) centers[i] = rho.center(i);

  // per-offset distance/cost tables: costs depend only on the index offset,
  // so the hot relaxation loop avoids norm/pow entirely
  const int ox = nx - 1, oy = ny - 1;
  const int tw = 2 * nx - 1;
  std::vector<double> off_dist((std::size_t)tw * (2 * ny - 1));
  std::vector<double> off_cost(off_dist.size());
  for (int dy = -oy; dy <= oy; ++dy)
    for (int dx = -ox; dx <= ox; ++dx) {
      const double d = std::hypot(dx * h, dy * h);
      const std::size_t k = (std::size_t)(dy + oy) * tw + (dx + ox);
      off_dist[k] = d;
      off_cost[k] = std::pow(d, p);
    }
  auto offset_key = [&](int cell_a, int cell_b) {
    const int dx = cell_b % nx - cell_a % nx;
    const int dy = cell_b / nx - cell_a / nx;
    return (std::size_t)(dy + oy) * tw + (dx + ox);
  };
  // halfspace filter: precomputed signed side per cell
  std::vector<double> side;
  if (options.filter.mode == EdgeMode::Halfspace) {
    side.resize(ncells);
    for (int i = 0; i < ncells; ++i)
      side[i] = dot(centers[i] - options.filter.origin, options.filter.nu);
  }
  auto allowed = [&](int cell_a, int cell_b) {
    switch (options.filter.mode) {
      case EdgeMode::All:
        return true;
      case EdgeMode::Rightward:
        return cell_b % nx >= cell_a % nx && cell_b / nx >= cell_a / nx;
      case EdgeMode::Halfspace:
        return side[cell_a] * side[cell_b] >= 0.0;
    }
    return true;
  };

  // 1D with unrestricted direction admits an exact monotone-plan solve;
  // certificate failure there falls through to the general machinery
  if (ny == 1 && options.filter.mode == EdgeMode::All && p >= 1.0) {
    if (auto fast =
            solve_line_monotone(ncells, q, off_cost, off_dist, bound, win)) {
      fast->plan.p = p;
      return *fast;
    }
  }

  std::vector<std::int64_t> remaining(S), cap_left(T);

  // Shortest-path arithmetic runs on integer costs: node potentials grow
  // with every augmentation, and cancellation in double-precision reduced
  // costs eventually produces bogus negative arcs (parent cycles). The
  // rounding error of the integerization, ~2^-40 relative, is far below
  // every tolerance used here and is measured by the final certificate.
  double max_cost = 0.0;
  for (double c : off_cost) max_cost = std::max(max_cost, c);
  const double cs = (double)(1ll << 40) / std::max(max_cost, 1e-300);
  std::vector<std::int64_t> off_cost_i(off_cost.size());
  for (std::size_t k = 0; k < off_cost.size(); ++k)
    off_cost_i[k] = std::llround(off_cost[k] * cs);
  constexpr std::int64_t kInfInt =
      std::numeric_limits<std::int64_t>::max() / 4;

  // sparse flow
  std::vector<FlowEdge> edges;
  std::unordered_map<std::int64_t, int> edge_index;
  std::vector<std::vector<int>> sink_edges(T);
  auto get_edge = [&](int s, int t, double cost,
                      std::int64_t cost_i) -> FlowEdge& {
    const std::int64_t key = (std::int64_t)s * T + t;
    auto it = edge_index.find(key);
    if (it == edge_index.end()) {
      edge_index.emplace(key, (int)edges.size());
      sink_edges[t].push_back((int)edges.size());
      edges.push_back({s, t, 0, cost, cost_i});
      return edges.back();
    }
    return edges[it->second];
  };

  std::vector<std::int64_t> pi(n_nodes, 0), dist(n_nodes);
  std::vector<int> parent(n_nodes);       // previous node on the path
  std::vector<int> parent_edge(n_nodes);  // flow-edge index for reverse hops
  std::vector<char> popped(n_nodes);

  // candidate sinks of a source cell, window-limited
  auto for_each_sink = [&](int cell, int w, auto&& fn) {
    const int sx = cell % nx, sy = cell / nx;
    const int x0 = std::max(0, sx - w), x1 = std::min(nx - 1, sx + w);
    const int y0 = std::max(0, sy - w), y1 = std::min(ny - 1, sy + w);
    for (int iy = y0; iy <= y1; ++iy) {
      const int row = iy * nx;
      for (int ix = x0; ix <= x1; ++ix) {
        const int t = sink_of_cell[row + ix];
        if (t < 0) continue;
        fn(t, row + ix);
      }
    }
  };

  // ties are broken toward the larger node index so sinks pop before
  // sources at equal distance: zero-cost in-place augmentations then touch
  // a single source window instead of all of them
  using HeapItem = std::pair<std::int64_t, int>;  // (dist, -node)
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

  // The shortest-path phase runs with a reduced candidate window: most
  // optimal moves are short, and global optimality is certified afterwards
  // against the full pruned edge set. On an infeasible run or a failed
  // certificate the window grows and the solve restarts.
  auto run_ssp = [&](int wr) -> bool {
    for (int s = 0; s < S; ++s) remaining[s] = q.supply[sources[s]];
    for (int t = 0; t < T; ++t) cap_left[t] = q.capacity[sinks[t]];
    edges.clear();
    edge_index.clear();
    for (auto& se : sink_edges) se.clear();
    std::fill(pi.begin(), pi.end(), 0);

  std::int64_t left = q.total_supply;
  // Augment from one excess source at a time, in index order. A source's
  // remaining supply never grows, so the cursor only moves forward. In the
  // rightward 1D case this order reproduces the optimal FIFO sweep and
  // avoids flow reassignment entirely.
  int cursor = 0;
  while (left > 0) {
    while (cursor < S && remaining[cursor] == 0) ++cursor;
    if (cursor >= S) return false;
    std::fill(dist.begin(), dist.end(), kInfInt);
    std::fill(popped.begin(), popped.end(), 0);
    heap = {};
    dist[cursor] = 0;
    parent[cursor] = -1;
    heap.push({0, -cursor});
    int target = -1;
    std::int64_t dist_target = kInfInt;
    while (!heap.empty()) {
      const auto [du, nu_] = heap.top();
      const int u = -nu_;
      heap.pop();
      if (popped[u] || du > dist[u]) continue;
      popped[u] = 1;
      if (u >= S) {
        const int t = u - S;
        if (cap_left[t] > 0) {
          target = t;
          dist_target = dist[u];
          break;
        }
        // reverse residual edges: sink -> source with positive flow
        for (int ei : sink_edges[t]) {
          const FlowEdge& e = edges[ei];
          if (e.flow <= 0) continue;
          const std::int64_t nd = dist[u] - e.cost_i + pi[u] - pi[e.src];
          if (nd < dist[e.src]) {
            dist[e.src] = nd;
            parent[e.src] = u;
            parent_edge[e.src] = ei;
            heap.push({nd, -e.src});
          }
        }
      } else {
        const int cell = sources[u];
        const std::int64_t du_pi = dist[u] + pi[u];
        for_each_sink(cell, wr, [&](int t, int tcell) {
          const std::size_t k = offset_key(cell, tcell);
          if (options.prune && off_dist[k] > bound) return;
          if (!allowed(cell, tcell)) return;
          const int v = S + t;
          const std::int64_t nd = du_pi + off_cost_i[k] - pi[v];
          if (nd < dist[v]) {
            dist[v] = nd;
            parent[v] = u;
            parent_edge[v] = -1;
            heap.push({nd, -v});
          }
        });
      }
    }
    if (target < 0) return false;

    for (int v = 0; v < n_nodes; ++v)
      pi[v] += std::min(dist[v], dist_target);

    // walk the path backwards to find the bottleneck
    std::int64_t delta = cap_left[target];
    for (int v = S + target; parent[v] >= 0; v = parent[v]) {
      if (v < S) delta = std::min(delta, edges[parent_edge[v]].flow);
    }
    {
      int v = S + target;
      while (parent[v] >= 0) v = parent[v];
      delta = std::min(delta, remaining[v]);
    }
    // apply
    cap_left[target] -= delta;
    int v = S + target;
    while (parent[v] >= 0) {
      const int u = parent[v];
      if (v >= S) {
        // forward edge u(source) -> v(sink)
        const std::size_t k = offset_key(sources[u], sinks[v - S]);
        FlowEdge& e = get_edge(u, v - S, off_cost[k], off_cost_i[k]);
        e.flow += delta;
      } else {
        edges[parent_edge[v]].flow -= delta;
      }
      v = u;
    }
    remaining[v] -= delta;
    left -= delta;
  }
  return true;
  };

  // dual certificate over the full pruned edge set, plus slackness on
  // flow-carrying edges
  auto certificate_gap = [&]() {
    double gap = 0.0;
    for (int s = 0; s < S; ++s) {
      const int cell = sources[s];
      for_each_sink(cell, win, [&](int t, int tcell) {
        const std::size_t k = offset_key(cell, tcell);
        if (options.prune && off_dist[k] > bound) return;
        if (!allowed(cell, tcell)) return;
        const double rc = off_cost[k] + (double)(pi[s] - pi[S + t]) / cs;
        if (-rc > gap) gap = -rc;
      });
    }
    for (const FlowEdge& e : edges) {
      if (e.flow <= 0) continue;
      const double rc = e.cost + (double)(pi[e.src] - pi[S + e.snk]) / cs;
      gap = std::max(gap, std::abs(rc));
    }
    return gap;
  };

  double gap = kInf;
  for (int wr = std::min(win, 8);; wr = std::min(win, wr * 4)) {
    const bool feasible = run_ssp(wr);
    if (feasible) {
      gap = certificate_gap();
      if (gap <= kDualTol) break;
    }
    if (wr >= win) {
      if (!feasible)
        throw CapacityError("solve_partial_ot: no augmenting path", 0.0);
      throw CertificateError("solve_partial_ot: dual certificate failed");
    }
  }

  SolveResult out;
  out.plan.p = p;
  out.certificate_gap = gap;
  std::vector<const FlowEdge*> used;
  for (const FlowEdge& e : edges)
    if (e.flow > 0) used.push_back(&e);
  std::sort(used.begin(), used.end(), [&](const FlowEdge* a, const FlowEdge* b) {
    return std::tie(sources[a->src], sinks[a->snk]) <
           std::tie(sources[b->src], sinks[b->snk]);
  });
  for (const FlowEdge* e : used) {
    const double m = (double)e->flow / (double)kMassScale;
    out.plan.entries.push_back({sources[e->src], sinks[e->snk], m});
    out.plan.total_cost += m * e->cost;
    out.max_distance = std::max(
        out.max_distance, norm(centers[sources[e->src]] - centers[sinks[e->snk]]));
  }
  out.energy = out.plan.total_cost;
  return out;
}

double max_transport_distance(const GridDensity& rho, const DiscretePlan& plan) {
  double d = 0.0;
  for (const PlanEntry& e : plan.entries) {
    if (e.mass <= 1e-12) continue;
    d = std::max(d, norm(rho.center(e.src) - rho.center(e.dst)));
  }
  return d;
}

InteriorBallReport interior_ball_check(const GridDensity& rho,
                                       const DiscretePlan& plan) {
  const double meas = rho.cell_measure();
  const double diam = rho.cell_diameter();
  const int nx = rho.nx(), ny = rho.ny();
  // second marginal per cell
  std::vector<double> marginal(rho.cell_count(), 0.0);
  for (const PlanEntry& e : plan.entries) marginal[e.dst] += e.mass;

  InteriorBallReport rep;
  for (std::size_t k = 0; k < plan.entries.size(); ++k) {
    const PlanEntry& e = plan.entries[k];
    if (e.mass <= 1e-12) continue;
    const Vec2 x = rho.center(e.src);
    const double r = norm(rho.center(e.dst) - x);
    if (r <= 2.0 * diam) continue;
    ++rep.checked_pairs;
    // cells whose center lies well inside the ball
    const double rin = r - diam;
    double under = 0.0;
    const int w = (int)std::ceil(r / rho.cell_width()) + 1;
    const int sx = e.src % nx, sy = e.src / nx;
    for (int iy = std::max(0, sy - w); iy <= std::min(ny - 1, sy + w); ++iy) {
      for (int ix = std::max(0, sx - w); ix <= std::min(nx - 1, sx + w); ++ix) {
        const int idx = iy * nx + ix;
        if (norm(rho.center(idx) - x) >= rin) continue;
        const double cap = (1.0 - rho.value(idx)) * meas;
        under += std::max(0.0, cap - marginal[idx]);
      }
    }
    rep.worst_gap = std::max(rep.worst_gap, under);
    if (under > 3.0 * meas) rep.violations.push_back({(int)k, under});
  }
  return rep;
}

double crossing_mass(const GridDensity& rho, const DiscretePlan& plan,
                     Vec2 nu, Vec2 origin) {
  const double n = norm(nu);
  if (std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument("crossing_mass: nu must be a unit vector");
  const double band = rho.cell_diameter();
  double total = 0.0;
  for (const PlanEntry& e : plan.entries) {
    const double sa = dot(rho.center(e.src) - origin, nu);
    const double sb = dot(rho.center(e.dst) - origin, nu);
    if (sa * sb < 0.0 && std::abs(sa) > band && std::abs(sb) > band)
      total += e.mass;
  }
  return total;
}

}  // namespace otmax
