#include "otmax/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace otmax {

namespace {

constexpr double kValueTol = 1e-12;

void validate_values(std::vector<double>& values) {
  for (double& v : values) {
    if (v < -kValueTol || v > 1.0 + kValueTol)
      throw std::invalid_argument("density value outside [0,1]");
    v = std::clamp(v, 0.0, 1.0);
  }
}

}  // namespace

double unit_ball_volume(int dim) {
  return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double unit_sphere_measure(int dim) { return dim * unit_ball_volume(dim); }

Density1D::Density1D(double x_lo, double cell_width, std::vector<double> values,
                     WeightedMeasure measure)
    : x_lo_(x_lo), cell_width_(cell_width), values_(std::move(values)),
      measure_(measure) {
  if (cell_width_ <= 0.0) throw std::invalid_argument("cell width must be positive");
  if (!measure_.is_constant() && x_lo_ < -kValueTol)
    throw std::invalid_argument("power weight requires a half-line domain");
  validate_values(values_);
}

GridDensity::GridDensity(int dim, double cell_width, std::array<double, 2> origin,
                         std::array<int, 2> shape, std::vector<double> values)
    : dim_(dim), h_(cell_width), origin_(origin), shape_(shape),
      values_(std::move(values)) {
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("dim must be 1 or 2");
  if (h_ <= 0.0) throw std::invalid_argument("cell width must be positive");
  if (dim_ == 1) shape_[1] = 1;
  if (shape_[0] <= 0 || shape_[1] <= 0)
    throw std::invalid_argument("grid shape must be positive");
  if (static_cast<int>(values_.size()) != shape_[0] * shape_[1])
    throw std::invalid_argument("value count does not match grid shape");
  validate_values(values_);
}

double mass(const Density1D& rho) {
  double m = 0.0;
  for (int i = 0; i < rho.size(); ++i) m += rho.value(i) * rho.cell_measure(i);
  return m;
}

double mass(const GridDensity& rho) {
  const double meas = rho.cell_measure();
  double m = 0.0;
  for (double v : rho.values()) m += v * meas;
  return m;
}

double volume_inverse(const Density1D& rho, double v) {
  const double m = mass(rho);
  if (v < -1e-12 || v > m + 1e-12)
    throw std::domain_error("volume_inverse: v outside [0, mass]");
  v = std::clamp(v, 0.0, m);
  if (v == 0.0) return rho.x_lo();
  double cum = 0.0;
  for (int i = 0; i < rho.size(); ++i) {
    const double cell = rho.value(i) * rho.cell_measure(i);
    if (cum + cell >= v && cell > 0.0) {
      // invert V restricted to this cell: rho is constant there
      const double need = (v - cum) / rho.value(i);
      const double target = rho.measure().primitive(rho.cell_left(i)) + need;
      return rho.measure().inverse_primitive(target);
    }
    cum += cell;
  }
  return rho.x_hi();
}

namespace {

// Ball radius with unit volume in the grid's dimension.
double unit_ball_radius(int dim) {
  return std::pow(1.0 / unit_ball_volume(dim), 1.0 / dim);
}

// ||rho - chi_B(c)||_1 with membership decided at cell centers.
double l1_to_ball(const GridDensity& rho, double total_mass, const Vec2& c,
                  double r) {
  const double meas = rho.cell_measure();
  const double r2 = r * r;
  const int nx = rho.nx(), ny = rho.ny();
  const double h = rho.cell_width();
  const auto& origin = rho.origin();
  // virtual index window of cells whose center may lie in the ball;
  // cells beyond the grid carry rho = 0
  const int ix_lo = (int)std::floor((c.x - r - origin[0]) / h) - 1;
  const int ix_hi = (int)std::ceil((c.x + r - origin[0]) / h) + 1;
  int iy_lo = 0, iy_hi = 0;
  if (rho.dim() == 2) {
    iy_lo = (int)std::floor((c.y - r - origin[1]) / h) - 1;
    iy_hi = (int)std::ceil((c.y + r - origin[1]) / h) + 1;
  }
  double inside = 0.0;  // sum over ball cells of (1 - 2 rho) * meas
  for (int iy = iy_lo; iy <= iy_hi; ++iy) {
    const double cy = rho.dim() == 2 ? origin[1] + h * (iy + 0.5) : 0.0;
    const double dy = rho.dim() == 2 ? cy - c.y : 0.0;
    for (int ix = ix_lo; ix <= ix_hi; ++ix) {
      const double cx = origin[0] + h * (ix + 0.5);
      const double dx = cx - c.x;
      if (dx * dx + dy * dy >= r2) continue;
      double v = 0.0;
      if (ix >= 0 && ix < nx && iy >= 0 && iy < ny) v = rho.value(iy * nx + ix);
      inside += (1.0 - 2.0 * v) * meas;
    }
  }
  return total_mass + inside;
}

}  // namespace

double asymmetry(const GridDensity& rho) {
  const double m = mass(rho);
  if (std::abs(m - 1.0) > 1e-9)
    throw std::domain_error("asymmetry requires unit mass");
  const int dim = rho.dim();
  const double r = unit_ball_radius(dim);
  const double h = rho.cell_width();
  const auto& origin = rho.origin();
  const double pad = 2.0 * r;
  const double x_lo = origin[0] - pad, x_hi = origin[0] + h * rho.nx() + pad;
  const double y_lo = origin[1] - pad;
  const double y_hi = dim == 2 ? origin[1] + h * rho.ny() + pad : origin[1];

  auto eval = [&](const Vec2& c) { return l1_to_ball(rho, m, c, r); };

  Vec2 best{x_lo, y_lo};
  double best_val = std::numeric_limits<double>::infinity();
  const double step = h;
  const int nx_steps = (int)std::ceil((x_hi - x_lo) / step);
  const int ny_steps = dim == 2 ? (int)std::ceil((y_hi - y_lo) / step) : 0;
  for (int j = 0; j <= ny_steps; ++j) {
    for (int i = 0; i <= nx_steps; ++i) {
      Vec2 c{x_lo + step * i, dim == 2 ? y_lo + step * j : 0.0};
      const double val = eval(c);
      if (val < best_val) {
        best_val = val;
        best = c;
      }
    }
  }

  // Golden-section refinement per coordinate around the best grid node.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int pass = 0; pass < (dim == 2 ? 2 : 1); ++pass) {
    for (int axis = 0; axis < dim; ++axis) {
      double a = (axis == 0 ? best.x : best.y) - step;
      double b = (axis == 0 ? best.x : best.y) + step;
      auto at = [&](double t) {
        Vec2 c = best;
        (axis == 0 ? c.x : c.y) = t;
        return eval(c);
      };
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      double f1 = at(c1), f2 = at(c2);
      while (b - a > 1e-6) {
        if (f1 < f2) {
          b = c2; c2 = c1; f2 = f1;
          c1 = b - gr * (b - a); f1 = at(c1);
        } else {
          a = c1; c1 = c2; f1 = f2;
          c2 = a + gr * (b - a); f2 = at(c2);
        }
      }
      const double t = (f1 < f2) ? c1 : c2;
      const double ft = std::min(f1, f2);
      if (ft < best_val) {
        best_val = ft;
        (axis == 0 ? best.x : best.y) = t;
      }
    }
  }
  return std::clamp(best_val, 0.0, 2.0);
}

GridDensity rescale(const GridDensity& rho, double t) {
  if (t <= 0.0) throw std::invalid_argument("rescale factor must be positive");
  return GridDensity(rho.dim(), rho.cell_width() * t,
                     {rho.origin()[0] * t, rho.origin()[1] * t}, rho.shape(),
                     rho.values());
}

CubeApproximation cube_approximation(const GridDensity& rho, int n) {
  const double m = mass(rho);
  if (std::abs(m - 1.0) > 1e-9)
    throw std::domain_error("cube_approximation requires unit mass");
  if (n <= 0) throw std::invalid_argument("n must be positive");
  const int dim = rho.dim();
  const double h = rho.cell_width();
  const double side = 1.0 / (n * std::sqrt((double)dim));
  const int k = (int)std::floor(side / h + 1e-12);
  if (k < 1)
    throw ResolutionError("cube_approximation: cubes finer than the grid");
  const double meas = rho.cell_measure();
  const int nx = rho.nx(), ny = rho.ny();
  std::vector<double> out(rho.cell_count(), 0.0);

  const long long target_cells = std::llround(1.0 / meas);
  long long filled_total = 0;
  double carry = 0.0;
  std::vector<int> block_cells;
  int last_block_first = -1;

  const int bx = (nx + k - 1) / k;
  const int by = dim == 2 ? (ny + k - 1) / k : 1;
  for (int jb = 0; jb < by; ++jb) {
    for (int ib = 0; ib < bx; ++ib) {
      block_cells.clear();
      for (int iy = jb * k; iy < std::min((jb + 1) * k, ny); ++iy)
        for (int ix = ib * k; ix < std::min((ib + 1) * k, nx); ++ix)
          block_cells.push_back(iy * nx + ix);
      double target = carry;
      for (int idx : block_cells) target += rho.value(idx) * meas;
      // fill the fullest cells first so indicators reproduce themselves
      std::stable_sort(block_cells.begin(), block_cells.end(),
                       [&](int a, int b) { return rho.value(a) > rho.value(b); });
      int fill = (int)std::llround(target / meas);
      fill = std::clamp(fill, 0, (int)block_cells.size());
      for (int c = 0; c < fill; ++c) out[block_cells[c]] = 1.0;
      filled_total += fill;
      carry = target - fill * meas;
      if (fill < (int)block_cells.size() || fill > 0) last_block_first = jb * bx + ib;
    }
  }
  // Exact global correction: flip cells in the final partially-used block.
  if (filled_total != target_cells) {
    long long need = target_cells - filled_total;
    for (int jb = by - 1; jb >= 0 && need != 0; --jb) {
      for (int ib = bx - 1; ib >= 0 && need != 0; --ib) {
        for (int iy = std::min((jb + 1) * k, ny) - 1; iy >= jb * k && need != 0; --iy) {
          for (int ix = std::min((ib + 1) * k, nx) - 1; ix >= ib * k && need != 0; --ix) {
            const int idx = iy * nx + ix;
            if (need > 0 && out[idx] == 0.0) { out[idx] = 1.0; --need; }
            else if (need < 0 && out[idx] == 1.0) { out[idx] = 0.0; ++need; }
          }
        }
      }
    }
  }
  (void)last_block_first;
  return {GridDensity(dim, h, rho.origin(), rho.shape(), std::move(out)),
          1.0 / n};
}

QuantizedCells quantize_cells(const std::vector<double>& values,
                              const std::vector<double>& measures) {
  const std::size_t n = values.size();
  QuantizedCells q;
  q.supply.resize(n);
  q.capacity.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += values[i] * measures[i];
  const std::int64_t total_units = std::llround(total * kMassScale);
  std::int64_t sum = 0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    q.supply[i] = std::llround(values[i] * measures[i] * kMassScale);
    q.capacity[i] = std::llround((1.0 - values[i]) * measures[i] * kMassScale);
    sum += q.supply[i];
    if (q.supply[i] > q.supply[largest]) largest = i;
  }
  // repair rounding drift on the largest cell
  q.supply[largest] += total_units - sum;
  if (q.supply[largest] < 0) q.supply[largest] = 0;
  q.total_supply = total_units;
  return q;
}

}  // namespace otmax
