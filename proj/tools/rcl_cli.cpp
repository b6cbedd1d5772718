#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcl/bounds.hpp"
#include "rcl/cheeger.hpp"
#include "rcl/experiment.hpp"
#include "rcl/kostlan.hpp"
#include "rcl/projective.hpp"
#include "rcl/spectral.hpp"
#include "rcl/surface_mesh.hpp"
#include "rcl/systole.hpp"

namespace {

using json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

rcl::SurfaceMesh load_mesh(const std::string& prefix) {
  auto off = open_in(prefix + ".off");
  auto len = open_in(prefix + ".lengths");
  return rcl::read_mesh(off, len);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random complex plane curves as triangulated surfaces"};
  app.require_subcommand(1);

  int degree = 3;
  std::uint64_t seed = 1, stream = 0;
  std::string output;
  auto* sample = app.add_subcommand("sample", "draw a Kostlan polynomial");
  sample->add_option("-d,--degree", degree, "degree")->required();
  sample->add_option("--seed", seed, "ensemble seed");
  sample->add_option("--stream", stream, "stream index");
  sample->add_option("-o,--output", output, "polynomial file (stdout if omitted)");

  std::string poly_path, prefix;
  int level = 4;
  std::uint64_t pencil_seed = 1;
  auto* mesh = app.add_subcommand("mesh", "mesh Z(P) through a random pencil");
  mesh->add_option("-p,--poly", poly_path, "polynomial file")->required();
  mesh->add_option("-o,--output", prefix, "output prefix for .off/.lengths/.branches")->required();
  mesh->add_option("-l,--level", level, "icosahedral base level");
  mesh->add_option("--pencil-seed", pencil_seed, "seed of the projection frame");

  int k = 4;
  std::string mesh_prefix, field_out;
  auto* spectrum = app.add_subcommand("spectrum", "lowest Laplace eigenpairs of a mesh");
  spectrum->add_option("-m,--mesh", mesh_prefix, "mesh prefix (.off and .lengths)")->required();
  spectrum->add_option("-k", k, "number of eigenpairs");
  spectrum->add_option("--fields", field_out, "write eigenfunctions to <prefix>.<i>.field");

  int sweep_levels = 256;
  bool with_systole = false;
  std::string cut_out;
  auto* cheeger = app.add_subcommand("cheeger", "Cheeger bracket and systole of a mesh");
  cheeger->add_option("-m,--mesh", mesh_prefix, "mesh prefix (.off and .lengths)")->required();
  cheeger->add_option("-k", k, "eigenfunctions to sweep");
  cheeger->add_option("--sweep-levels", sweep_levels, "uniform sweep thresholds");
  cheeger->add_flag("--systole", with_systole, "also compute the homological systole");
  cheeger->add_option("--cut", cut_out, "write the realizing cut as face/halfedge segments");

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo configuration");
  experiment->add_option("-c,--config", config_path, "INI configuration")->required();

  double a_d = 0, C = 1;
  int n = 2;
  auto* bounds = app.add_subcommand("bounds", "threshold formulas for one degree");
  bounds->add_option("-d,--degree", degree, "degree (>= 2)")->required();
  bounds->add_option("-a,--a-d", a_d, "a_d (default 1/log(d+1))");
  bounds->add_option("-C", C, "constant C");
  bounds->add_option("-n", n, "ambient dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      const auto p = rcl::sample_kostlan(degree, {seed, stream});
      if (output.empty()) {
        rcl::write_polynomial(std::cout, p);
      } else {
        auto out = open_out(output);
        rcl::write_polynomial(out, p);
      }
    } else if (*mesh) {
      auto in = open_in(poly_path);
      const auto p = rcl::read_polynomial(in);
      const auto pencil = rcl::Pencil::random(p, {pencil_seed, 0});
      rcl::BranchedCover cover(p, pencil);
      rcl::LiftOptions opts;
      opts.level = level;
      const auto surf = rcl::build_surface(cover, opts);
      auto off = open_out(prefix + ".off");
      rcl::write_off(off, surf.mesh);
      auto len = open_out(prefix + ".lengths");
      rcl::write_lengths(len, surf.mesh);
      auto br = open_out(prefix + ".branches");
      rcl::write_branch_report(br, surf.branches);
      const auto eg = rcl::euler_genus(surf.mesh);
      print({{"vertices", surf.mesh.n_vertices()},
             {"edges", surf.mesh.n_edges()},
             {"faces", surf.mesh.n_faces()},
             {"genus", eg.genus},
             {"branch_points", surf.branches.size()},
             {"area", rcl::total_area(surf.mesh)},
             {"min_angle_deg", surf.mesh.min_angle_deg()},
             {"adaptive_rounds", surf.stats.adaptive_rounds}});
    } else if (*spectrum) {
      const auto m = load_mesh(mesh_prefix);
      const auto res = rcl::lowest_eigenpairs(rcl::assemble(m), k);
      json ev = json::array(), paper = json::array();
      for (int i = 0; i < res.size(); ++i) {
        ev.push_back(res.eigenvalues(i));
        paper.push_back(rcl::lambda_to_paper(res.eigenvalues(i)));
      }
      print({{"eigenvalues", ev},
             {"eigenvalues_paper", paper},
             {"residuals", res.residuals},
             {"iterations", res.iterations}});
      if (!field_out.empty()) {
        for (int i = 0; i < res.size(); ++i) {
          auto out = open_out(field_out + "." + std::to_string(i) + ".field");
          const Eigen::VectorXd col = res.eigenfunctions.col(i);
          rcl::write_vertex_field(out, std::span<const double>(col.data(), col.size()));
        }
      }
    } else if (*cheeger) {
      const auto m = load_mesh(mesh_prefix);
      const auto res = rcl::lowest_eigenpairs(rcl::assemble(m), k);
      const auto kf = rcl::curvature(m);
      rcl::SweepOptions so;
      so.uniform_levels = sweep_levels;
      const auto est = rcl::estimate_cheeger(m, res, kf.min_curvature(), so);
      const auto rep = rcl::cheeger_inequality_report(est.h_upper, res.lambda1(), est.h_lower);
      json j = {{"h_upper", est.h_upper},
                {"h_lower", est.h_lower},
                {"h_upper_paper", rcl::h_to_paper(est.h_upper)},
                {"h_lower_paper", rcl::h_to_paper(est.h_lower)},
                {"lambda1", res.lambda1()},
                {"curvature_floor", est.curvature_floor},
                {"cut_level", est.cut.level},
                {"cut_length", est.cut.length},
                {"cut_areas", {est.cut.area_below, est.cut.area_above}},
                {"cheeger_gap", rep.cheeger_gap},
                {"bracket_ordered", rep.bracket_ordered}};
      if (with_systole) {
        const auto sys = rcl::systole(m);
        j["genus"] = sys.genus;
        j["systole"] = sys.length ? json(*sys.length) : json(nullptr);
      }
      print(j);
      if (!cut_out.empty()) {
        auto out = open_out(cut_out);
        out.precision(17);
        for (const auto& s : est.cut.curve) {
          out << s.face << ' ' << s.h0 << ' ' << s.s0 << ' ' << s.h1 << ' ' << s.s1 << '\n';
        }
      }
    } else if (*experiment) {
      const auto cfg = rcl::ExperimentConfig::load(config_path);
      const auto records = rcl::run_experiment(cfg);
      auto csv = open_out(cfg.csv);
      rcl::write_csv(csv, records);
      auto times = open_out(cfg.timings);
      rcl::write_timings(times, records);
      auto js = open_out(cfg.json);
      rcl::write_summary_json(js, rcl::summarize(records, cfg), cfg);
      int accepted = 0;
      for (const auto& r : records) accepted += r.accepted;
      std::cout << records.size() << " records, " << accepted << " accepted\n";
    } else if (*bounds) {
      const double a = a_d > 0 ? a_d : rcl::default_a(degree);
      const auto b = rcl::bound_calculator(degree, a, C, n);
      print({{"d", b.d},
             {"a_d", b.a_d},
             {"C", b.C},
             {"n", b.n},
             {"r_d", b.r_d},
             {"k_d", b.k_d},
             {"w_d", b.w_d},
             {"systole_threshold", b.systole_threshold},
             {"h_threshold", b.h_threshold},
             {"lambda1_threshold", b.lambda1_threshold}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
