#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otmax/lab.hpp"

namespace {

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"otmax: constrained transport energy laboratory"};
  // the default help flag owns "-h", which collides with "--h"
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  otmax::ExperimentConfig cfg;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.01, 1e-3};

  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help and exit");
    sub->add_option("--p", cfg.p, "cost exponent (> 1)");
    sub->add_option("--h", cfg.h, "grid cell width");
    sub->add_option("--rays", cfg.rays, "ray count for radial solves");
    sub->add_option("--samples", cfg.samples, "random sample count");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--input", cfg.input, "input density JSON file");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--solver", cfg.solver, "sweep|oracle|radial")
        ->check(CLI::IsMember({"sweep", "oracle", "radial"}));
  };

  CLI::App* energy =
      app.add_subcommand("energy", "energy report for a density file");
  add_common(energy);
  CLI::App* quant = app.add_subcommand(
      "quant1d", "asymmetry/deficit table for random 1D densities");
  add_common(quant);
  CLI::App* sharp = app.add_subcommand(
      "sharpness", "deficit/asymmetry^2 curve of the near-ball family");
  add_common(sharp);
  sharp->add_option("--eps", eps_list, "epsilon values in (0, 1/4)");
  CLI::App* ver = app.add_subcommand("verify", "run the invariant suite");
  add_common(ver);
  ver->add_option("--ball-scale", cfg.ball_scale,
                  "mis-scale the reference ball (negative control)");

  // verify defaults to a coarser grid than the solvers
  bool h_given = false;
  ver->callback([&] { h_given = ver->count("--h") > 0; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (energy->parsed()) {
      if (cfg.input.empty())
        throw std::runtime_error("energy requires --input");
      const otmax::DensityFile df = otmax::load_density(cfg.input);
      const otmax::EnergyReport rep = otmax::compute_energy(df, cfg);
      write_or_print(cfg.out, otmax::energy_report_json(rep));
    } else if (quant->parsed()) {
      const otmax::QuantResult q = otmax::quant1d(cfg);
      write_or_print(cfg.out, otmax::quant_csv(q));
      std::cerr << "min_ratio=" << otmax::format_number(q.min_ratio) << '\n';
    } else if (sharp->parsed()) {
      const auto rows = otmax::sharpness(cfg, eps_list, true);
      write_or_print(cfg.out, otmax::sharpness_csv(rows));
    } else if (ver->parsed()) {
      if (!h_given) cfg.h = 0.01;
      const auto checks = otmax::verify(cfg);
      write_or_print(cfg.out, otmax::verify_report_json(checks));
      for (const auto& c : checks)
        if (!c.pass) return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
