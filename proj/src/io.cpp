#include "otmax/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace otmax {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ordered_json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

DensityFile load_density(const std::string& path) {
  const ordered_json j = read_json(path);
  const int dim = j.at("dim").get<int>();
  if (dim < 1 || dim > 2)
    throw std::runtime_error(path + ": dim must be 1 or 2");
  const double h = j.at("cell_width").get<double>();
  const auto origin_v = j.at("origin").get<std::vector<double>>();
  const auto shape_v = j.at("shape").get<std::vector<int>>();
  if ((int)origin_v.size() != dim || (int)shape_v.size() != dim)
    throw std::runtime_error(path + ": origin/shape size must equal dim");
  std::array<double, 2> origin{origin_v[0], dim == 2 ? origin_v[1] : 0.0};
  std::array<int, 2> shape{shape_v[0], dim == 2 ? shape_v[1] : 1};
  auto values = j.at("values").get<std::vector<double>>();

  WeightedMeasure w = WeightedMeasure::constant();
  if (j.contains("weight")) {
    const auto& jw = j.at("weight");
    const std::string kind = jw.at("kind").get<std::string>();
    if (kind == "power")
      w = WeightedMeasure::power(jw.at("exponent").get<double>());
    else if (kind != "constant")
      throw std::runtime_error(path + ": unknown weight kind " + kind);
  }
  return {GridDensity(dim, h, origin, shape, std::move(values)), w};
}

void save_density(const DensityFile& df, const std::string& path) {
  const GridDensity& rho = df.density;
  ordered_json j;
  j["dim"] = rho.dim();
  j["cell_width"] = rho.cell_width();
  std::vector<double> origin{rho.origin()[0]};
  std::vector<int> shape{rho.shape()[0]};
  if (rho.dim() == 2) {
    origin.push_back(rho.origin()[1]);
    shape.push_back(rho.shape()[1]);
  }
  j["origin"] = origin;
  j["shape"] = shape;
  j["values"] = rho.values();
  if (df.weight.is_constant())
    j["weight"] = {{"kind", "constant"}};
  else
    j["weight"] = {{"kind", "power"}, {"exponent", df.weight.exponent}};
  write_text(path, j.dump(2) + "\n");
}

Density1D to_line(const GridDensity& rho, const WeightedMeasure& w) {
  if (rho.dim() != 1)
    throw UnsupportedGeometryError("to_line requires a 1D grid density");
  return Density1D(rho.origin()[0], rho.cell_width(), rho.values(), w);
}

void export_density_csv(const GridDensity& rho, const std::string& path) {
  std::ostringstream out;
  if (rho.dim() == 1) {
    out << "x,value\n";
    for (int i = 0; i < rho.cell_count(); ++i)
      out << format_number(rho.center(i).x) << ','
          << format_number(rho.value(i)) << '\n';
  } else {
    out << "x,y,value\n";
    for (int i = 0; i < rho.cell_count(); ++i) {
      const Vec2 c = rho.center(i);
      out << format_number(c.x) << ',' << format_number(c.y) << ','
          << format_number(rho.value(i)) << '\n';
    }
  }
  write_text(path, out.str());
}

void export_plan_csv(const MonotonePlan& plan, const std::string& path) {
  std::ostringstream out;
  out << "source,target,mass\n";
  for (const Parcel& par : plan.parcels)
    out << format_number(par.source) << ',' << format_number(par.target)
        << ',' << format_number(par.mass) << '\n';
  write_text(path, out.str());
}

void export_plan_csv(const GridDensity& rho, const DiscretePlan& plan,
                     const std::string& path) {
  std::ostringstream out;
  out << "xi,yi,xj,yj,mass,cost\n";
  for (const PlanEntry& e : plan.entries) {
    const Vec2 a = rho.center(e.src), b = rho.center(e.dst);
    const double cost = std::pow(norm(b - a), plan.p);
    out << format_number(a.x) << ',' << format_number(a.y) << ','
        << format_number(b.x) << ',' << format_number(b.y) << ','
        << format_number(e.mass) << ',' << format_number(cost) << '\n';
  }
  write_text(path, out.str());
}

void export_profile_csv(const VolumeProfile& profile,
                        const std::vector<double>& reference,
                        const std::string& path) {
  if (reference.size() != profile.volumes.size())
    throw std::invalid_argument("export_profile_csv: size mismatch");
  std::ostringstream out;
  out << "v,d,d_rho\n";
  for (std::size_t j = 0; j < profile.volumes.size(); ++j)
    out << format_number(profile.volumes[j]) << ','
        << format_number(reference[j]) << ','
        << format_number(profile.distances[j]) << '\n';
  write_text(path, out.str());
}

void export_rays_csv(const RadialDensity& rd, double p,
                     const std::string& path) {
  std::ostringstream out;
  out << "omega_angle,m_omega,ell_omega,ray_energy\n";
  for (const RadialRay& ray : rd.rays) {
    const double m = mass(ray.density);
    const double ell = m > 0.0 ? volume_inverse(ray.density, m) : 0.0;
    const double e = sweep_rightward(ray.density, p).energy;
    out << format_number(ray.angle) << ',' << format_number(m) << ','
        << format_number(ell) << ',' << format_number(e) << '\n';
  }
  write_text(path, out.str());
}

std::string energy_report_json(const EnergyReport& rep) {
  ordered_json j;
  j["energy_p"] = rep.energy_p;
  j["p"] = rep.p;
  j["mass"] = rep.mass;
  j["max_distance"] = rep.max_distance;
  j["certificate_gap"] = rep.certificate_gap;
  if (rep.ball_violations >= 0) j["ball_violations"] = rep.ball_violations;
  return j.dump(2) + "\n";
}

void save_energy_report(const EnergyReport& rep, const std::string& path) {
  write_text(path, energy_report_json(rep));
}

}  // namespace otmax
