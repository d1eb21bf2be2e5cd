#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "otmax/io.hpp"
#include "otmax/lab.hpp"
#include "otmax/radial.hpp"

using namespace otmax;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

GridDensity box_1d(double x_lo, double x_hi, double a, double b, double h) {
  const int n = (int)std::llround((x_hi - x_lo) / h);
  std::vector<double> vals(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double lo = x_lo + h * i, hi = lo + h;
    vals[i] = std::max(0.0, std::min(hi, b) - std::max(lo, a)) / h;
  }
  return GridDensity(1, h, {x_lo, 0.0}, {n, 1}, std::move(vals));
}

}  // namespace

TEST_CASE("density csv lists one row per cell with a header") {
  const GridDensity rho = box_1d(-0.5, 1.5, 0.0, 1.0, 0.25);
  const std::string path = "io_density.csv";
  export_density_csv(rho, path);
  const std::string text = slurp(path);
  CHECK(first_line(text) == "x,value");
  CHECK(line_count(text) == rho.cell_count() + 1);

  const GridDensity disk = disk_density(0.2, 8, 0.5);
  export_density_csv(disk, path);
  const std::string text2 = slurp(path);
  CHECK(first_line(text2) == "x,y,value");
  CHECK(line_count(text2) == disk.cell_count() + 1);
  std::remove(path.c_str());
}

TEST_CASE("monotone plan csv carries the sweep parcels") {
  const GridDensity rho = box_1d(0.0, 4.0, 0.0, 1.0, 0.05);
  const SweepResult sr =
      sweep_rightward(to_line(rho, WeightedMeasure::constant()), 2.0);
  const std::string path = "io_plan1d.csv";
  export_plan_csv(sr.plan, path);
  const std::string text = slurp(path);
  CHECK(first_line(text) == "source,target,mass");
  CHECK(line_count(text) == (int)sr.plan.parcels.size() + 1);
  std::remove(path.c_str());
}

TEST_CASE("grid plan csv is bit-reproducible") {
  const GridDensity rho = box_1d(-1.0, 2.0, 0.0, 1.0, 0.05);
  const SolveResult res = solve_partial_ot(rho, 2.0);
  const std::string pa = "io_plan_a.csv", pb = "io_plan_b.csv";
  export_plan_csv(rho, res.plan, pa);
  export_plan_csv(rho, res.plan, pb);
  const std::string ta = slurp(pa), tb = slurp(pb);
  CHECK(first_line(ta) == "xi,yi,xj,yj,mass,cost");
  CHECK(line_count(ta) == (int)res.plan.entries.size() + 1);
  CHECK(ta == tb);
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

TEST_CASE("profile csv pairs the reference and measured distances") {
  const GridDensity rho = box_1d(0.0, 3.0, 0.0, 1.0, 0.05);
  const Density1D line = to_line(rho, WeightedMeasure::constant());
  const DominationReport rep = profile_dominates(line, 2.0, 64);
  const std::string path = "io_profile.csv";
  export_profile_csv(rep.profile, rep.reference, path);
  const std::string text = slurp(path);
  CHECK(first_line(text) == "v,d,d_rho");
  CHECK(line_count(text) == (int)rep.profile.volumes.size() + 1);
  std::remove(path.c_str());
}

TEST_CASE("rays csv emits one row per ray") {
  const GridDensity disk = disk_density(0.05, 32, 1.0);
  const RadialDensity rd = decompose(disk, 32);
  const std::string path = "io_rays.csv";
  export_rays_csv(rd, 2.0, path);
  const std::string text = slurp(path);
  CHECK(first_line(text) == "omega_angle,m_omega,ell_omega,ray_energy");
  CHECK(line_count(text) == (int)rd.rays.size() + 1);
  std::remove(path.c_str());
}
