#pragma once

#include <string>

#include "otmax/flow.hpp"
#include "otmax/line.hpp"
#include "otmax/measure.hpp"
#include "otmax/radial.hpp"

namespace otmax {

// Grid density plus the half-line weight it should be solved against.
struct DensityFile {
  GridDensity density;
  WeightedMeasure weight;
};

// JSON schema: {dim, cell_width, origin: [..], shape: [..],
// values: row-major flat array, weight: {"kind":"constant"} |
// {"kind":"power","exponent":k}}.
DensityFile load_density(const std::string& path);
void save_density(const DensityFile& df, const std::string& path);

// Converts a 1D grid density to a half-line Density1D with the given weight.
Density1D to_line(const GridDensity& rho, const WeightedMeasure& w);

// CSV exports, all with a header row.
void export_density_csv(const GridDensity& rho, const std::string& path);
void export_plan_csv(const MonotonePlan& plan, const std::string& path);
void export_plan_csv(const GridDensity& rho, const DiscretePlan& plan,
                     const std::string& path);
void export_profile_csv(const VolumeProfile& profile,
                        const std::vector<double>& reference,
                        const std::string& path);
void export_rays_csv(const RadialDensity& rd, double p,
                     const std::string& path);

struct EnergyReport {
  double energy_p = 0.0;
  double p = 2.0;
  double mass = 0.0;
  double max_distance = 0.0;
  double certificate_gap = 0.0;
  int ball_violations = -1;  // -1 when the check was not run
};

std::string energy_report_json(const EnergyReport& rep);
void save_energy_report(const EnergyReport& rep, const std::string& path);

// Numbers in artifacts are printed with fixed round-trip formatting so a
// given config + seed yields byte-identical outputs.
std::string format_number(double v);

}  // namespace otmax
