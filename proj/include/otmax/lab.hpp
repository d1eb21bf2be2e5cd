#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "otmax/io.hpp"

namespace otmax {

// Deterministic RNG: the raw mt19937_64 stream is mapped to doubles by a
// fixed bit shift, so sequences are identical across platforms and library
// versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int a, int b) {
    return a + (int)(eng_() % (std::uint64_t)(b - a + 1));
  }

 private:
  std::mt19937_64 eng_;
};

// Decorrelated per-sample seed stream.
std::uint64_t sample_seed(std::uint64_t seed, int index);

struct ExperimentConfig {
  double p = 2.0;
  double h = 2e-3;
  int rays = 256;
  int samples = 100;
  std::uint64_t seed = 0;
  std::string input;
  std::string out;
  std::string solver = "oracle";  // sweep | oracle | radial
  // Scale applied to the reference ball in the maximality check; values
  // other than 1 mis-specify the reference on purpose (negative control).
  double ball_scale = 1.0;
};

// Thread cap from OTMAX_THREADS (default 1).
int thread_cap();

// Unit-mass 1D density: 2..6 blocks with random widths/gaps, optionally
// softened values in (0,1), widths scaled so the mass is exactly 1;
// discretized by exact cell overlap with 1.25 padding on both sides.
GridDensity random_density_1d(Rng& rng, double h, bool soften);

// Random block density on the half-line [0, ...) for the given weight.
Density1D random_line_density(Rng& rng, double h, const WeightedMeasure& w,
                              bool soften);

// Random 2D density: a few overlapping axis-aligned rectangles with values
// below 1 on an n x n grid of the given cell width.
GridDensity random_density_2d(Rng& rng, double h, int n);

// Centered disk indicator of mass m on an n x n grid over
// [-n*h/2, n*h/2]^2, cell values by subsampled coverage; the radius is
// bisected so the discrete mass equals m within 1e-12.
GridDensity disk_density(double h, int n, double m);

struct QuantRow {
  int index = 0;
  double asymmetry = 0.0;
  double energy = 0.0;
  double deficit = 0.0;
};

struct QuantResult {
  std::vector<QuantRow> rows;
  double min_ratio = 0.0;  // min deficit/A^2 over rows with A > 0.05
};

// Random 1D densities vs the ball: deficit = 2^{-p} - oracle energy.
QuantResult quant1d(const ExperimentConfig& cfg);
std::string quant_csv(const QuantResult& q);

struct SharpnessRow {
  double eps = 0.0;
  double asymmetry = 0.0;
  double deficit = 0.0;
  double ratio = 0.0;          // deficit / asymmetry^2
  double oracle_energy = -1.0;  // -1 when the oracle was not run
};

// Closed-form sharp-example curve; the flow oracle cross-validates the two
// largest eps values when with_oracle is set.
std::vector<SharpnessRow> sharpness(const ExperimentConfig& cfg,
                                    const std::vector<double>& eps_list,
                                    bool with_oracle);
std::string sharpness_csv(const std::vector<SharpnessRow>& rows);

// Energy of a density file with the configured solver (sweep for 1D
// half-line rightward, oracle for general, radial for 2D star-shaped).
EnergyReport compute_energy(const DensityFile& df,
                            const ExperimentConfig& cfg);

struct CheckResult {
  std::string check;
  bool pass = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
};

// Full invariant suite at the configured resolution. Failures are data,
// not errors.
std::vector<CheckResult> verify(const ExperimentConfig& cfg);
std::string verify_report_json(const std::vector<CheckResult>& checks);

}  // namespace otmax
