#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "otmax/errors.hpp"

namespace otmax {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

// Surface/volume constants of the unit ball in R^N.
double unit_ball_volume(int dim);
double unit_sphere_measure(int dim);

enum class WeightKind { Constant, Power };

// Reference measure w(r) dr on the half-line, w non-decreasing.
// Constant: w = 1. Power: w(r) = r^k with k >= 0 (k = N-1 for per-ray
// problems in dimension N).
struct WeightedMeasure {
  WeightKind kind = WeightKind::Constant;
  double exponent = 0.0;

  static WeightedMeasure constant() { return {WeightKind::Constant, 0.0}; }
  static WeightedMeasure power(double k) { return {WeightKind::Power, k}; }

  bool is_constant() const { return kind == WeightKind::Constant; }

  double weight(double r) const {
    return is_constant() ? 1.0 : std::pow(r, exponent);
  }

  // V(x) = int_0^x w
  double primitive(double x) const {
    if (is_constant()) return x;
    return std::pow(x, exponent + 1.0) / (exponent + 1.0);
  }

  double inverse_primitive(double v) const {
    if (is_constant()) return v;
    return std::pow(v * (exponent + 1.0), 1.0 / (exponent + 1.0));
  }

  double integral(double a, double b) const {
    if (is_constant()) return b - a;
    return primitive(b) - primitive(a);
  }
};

// Piecewise-constant density on a uniform grid over an interval of the
// weighted (half-)line. Values live in [0,1].
class Density1D {
 public:
  Density1D(double x_lo, double cell_width, std::vector<double> values,
            WeightedMeasure measure = WeightedMeasure::constant());

  int size() const { return static_cast<int>(values_.size()); }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_lo_ + cell_width_ * size(); }
  double cell_width() const { return cell_width_; }
  double cell_left(int i) const { return x_lo_ + cell_width_ * i; }
  double cell_right(int i) const { return x_lo_ + cell_width_ * (i + 1); }
  double cell_mid(int i) const { return x_lo_ + cell_width_ * (i + 0.5); }
  double cell_measure(int i) const {
    if (measure_.is_constant()) return cell_width_;
    return measure_.integral(cell_left(i), cell_right(i));
  }
  double value(int i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  const WeightedMeasure& measure() const { return measure_; }

 private:
  double x_lo_;
  double cell_width_;
  std::vector<double> values_;
  WeightedMeasure measure_;
};

// N-dimensional (N in {1,2}) cell grid with Lebesgue cell measure h^N,
// values in [0,1]. Row-major storage, index = iy*nx + ix in 2D.
class GridDensity {
 public:
  GridDensity(int dim, double cell_width, std::array<double, 2> origin,
              std::array<int, 2> shape, std::vector<double> values);

  int dim() const { return dim_; }
  double cell_width() const { return h_; }
  const std::array<double, 2>& origin() const { return origin_; }
  const std::array<int, 2>& shape() const { return shape_; }
  int nx() const { return shape_[0]; }
  int ny() const { return dim_ == 2 ? shape_[1] : 1; }
  int cell_count() const { return nx() * ny(); }
  double cell_measure() const { return dim_ == 2 ? h_ * h_ : h_; }
  double cell_diameter() const { return dim_ == 2 ? h_ * std::sqrt(2.0) : h_; }

  Vec2 center(int idx) const {
    const int ix = idx % nx();
    const int iy = idx / nx();
    return {origin_[0] + h_ * (ix + 0.5),
            dim_ == 2 ? origin_[1] + h_ * (iy + 0.5) : 0.0};
  }
  double value(int idx) const { return values_[idx]; }
  const std::vector<double>& values() const { return values_; }

 private:
  int dim_;
  double h_;
  std::array<double, 2> origin_;
  std::array<int, 2> shape_;
  std::vector<double> values_;
};

double mass(const Density1D& rho);
double mass(const GridDensity& rho);

// Smallest x with V_rho(x) >= v, exact within a cell.
// Throws std::domain_error when v is outside [0, mass(rho)].
double volume_inverse(const Density1D& rho, double v);

// Positions and transport distances sampled against cumulative volume.
struct VolumeProfile {
  std::vector<double> volumes;    // v_j, strictly increasing in (0, m)
  std::vector<double> positions;  // x_j = V_rho^{-1}(v_j)
  std::vector<double> distances;  // d_j >= 0
};

// L1 distance to the nearest unit-volume ball indicator, inf over ball
// centers. Centers are scanned on the grid over the bounding box enlarged
// by one ball diameter, then refined per coordinate by golden section
// (tolerance 1e-6). Requires mass(rho) = 1 within 1e-9.
double asymmetry(const GridDensity& rho);

// rho_t(x) = rho(x/t); cell width becomes t*h and mass scales by t^dim.
GridDensity rescale(const GridDensity& rho, double t);

struct CubeApproximation {
  GridDensity indicator;
  double bound;  // guaranteed W_p(E_n, rho) <= 1/n
};

// Lemma-style indicator approximation: partition into cubes of diameter
// <= 1/n, fill whole cells per cube to match the cube's mass (running
// remainder carried to the next cube, final count corrected exactly).
// Requires mass(rho) = 1 within 1e-9.
CubeApproximation cube_approximation(const GridDensity& rho, int n);

// Shared supply/capacity integerization used by both the sweep solver and
// the flow oracle so their optima are comparable at 1e-9.
inline constexpr std::int64_t kMassScale = 1'000'000'000;

struct QuantizedCells {
  std::vector<std::int64_t> supply;
  std::vector<std::int64_t> capacity;
  std::int64_t total_supply = 0;
};

QuantizedCells quantize_cells(const std::vector<double>& values,
                              const std::vector<double>& measures);

}  // namespace otmax
