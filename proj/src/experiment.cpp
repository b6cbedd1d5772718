#include "rcl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "rcl/errors.hpp"
#include "rcl/systole.hpp"

namespace rcl {

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
  std::vector<T> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    std::istringstream s(p);
    T v;
    if (!(s >> v) || !s.eof()) throw DomainError("cannot parse list entry `" + p + "`");
    out.push_back(v);
  }
  return out;
}

bool parse_bool(const std::string& text) {
  const std::string t = boost::to_lower_copy(boost::trim_copy(text));
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw DomainError("cannot parse boolean `" + text + "`");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&)>;
  auto num = [](auto& field) {
    return Setter([&field](const std::string& v) {
      std::istringstream s(boost::trim_copy(v));
      if (!(s >> field) || !s.eof()) throw DomainError("cannot parse value `" + v + "`");
    });
  };
  auto str = [](std::string& field) {
    return Setter([&field](const std::string& v) { field = boost::trim_copy(v); });
  };
  auto flag = [](bool& field) { return Setter([&field](const std::string& v) { field = parse_bool(v); }); };
  const std::map<std::string, std::map<std::string, Setter>> keys = {
      {"experiment",
       {{"degrees", [&](const std::string& v) { c.degrees = parse_list<int>(v); }},
        {"samples", num(c.samples)},
        {"seed", num(c.seed)},
        {"threads", num(c.threads)},
        {"max_attempts", num(c.max_attempts)}}},
      {"mesh", {{"level", num(c.level)}}},
      {"spectrum", {{"k", num(c.eigen_count)}}},
      {"cheeger", {{"sweep_levels", num(c.sweep_levels)}, {"systole", flag(c.systole)}}},
      {"bounds",
       {{"C", num(c.C)}, {"a_rule", str(c.a_rule)}, {"a_value", num(c.a_value)}, {"n", num(c.n)}}},
      {"degenerate",
       {{"enabled", flag(c.degenerate)},
        {"kind", str(c.degenerate_kind)},
        {"d1", num(c.d1)},
        {"d2", num(c.d2)},
        {"eps", [&](const std::string& v) { c.eps = parse_list<double>(v); }},
        {"level", num(c.degenerate_level)}}},
      {"output", {{"csv", str(c.csv)}, {"json", str(c.json)}, {"timings", str(c.timings)}}},
  };
  for (const auto& [section, body] : tree) {
    auto sec = keys.find(section);
    if (sec == keys.end()) throw DomainError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) {
      throw DomainError("config: key `" + section + "` outside a section");
    }
    for (const auto& [key, value] : body) {
      auto k = sec->second.find(key);
      if (k == sec->second.end()) throw DomainError("config: unknown key " + section + "." + key);
      k->second(value.data());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (degrees.empty() && !degenerate) throw DomainError("config: no degrees");
  for (int d : degrees) {
    if (d < 1) throw DomainError("config: degrees must be >= 1");
  }
  if (samples < 1) throw DomainError("config: samples must be >= 1");
  if (max_attempts < 1) throw DomainError("config: max_attempts must be >= 1");
  if (level < 0 || degenerate_level < 0) throw DomainError("config: mesh level must be >= 0");
  if (eigen_count < 2) throw DomainError("config: k must be >= 2");
  if (sweep_levels < 0) throw DomainError("config: sweep_levels must be >= 0");
  if (!(C > 0)) throw DomainError("config: C must be positive");
  if (a_rule != "inverse_log" && a_rule != "fixed") throw DomainError("config: unknown a_rule");
  if (a_rule == "fixed" && !(a_value > 0)) throw DomainError("config: a_value must be positive");
  if (n < 1) throw DomainError("config: n must be >= 1");
  if (degenerate) {
    if (d1 < 1 || d2 < 1) throw DomainError("config: d1, d2 must be >= 1");
    if (eps.empty()) throw DomainError("config: empty eps list");
    for (double e : eps) {
      if (!(e > 0)) throw DomainError("config: eps values must be positive");
    }
    if (degenerate_kind != "canonical" && degenerate_kind != "random") {
      throw DomainError("config: degenerate kind must be canonical or random");
    }
    if (degenerate_kind == "canonical" && (d1 != 1 || d2 != 1)) {
      throw DomainError("config: the canonical degenerate family needs d1 = d2 = 1");
    }
  }
}

double ExperimentConfig::a_for(int d) const { return a_rule == "fixed" ? a_value : default_a(d); }

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kPencilBit = std::uint64_t{1} << 63;
constexpr std::uint64_t kDegenerateBit = std::uint64_t{1} << 62;
constexpr std::uint64_t kFactorBit = std::uint64_t{1} << 61;

std::uint64_t kostlan_stream(int degree, int index, int attempt) {
  return (static_cast<std::uint64_t>(degree) << 40) | (static_cast<std::uint64_t>(index) << 16) |
         static_cast<std::uint64_t>(attempt);
}

// Draw-level failures: the draw is discarded and the slot resampled.
bool resample_worthy(const std::exception& e) {
  return dynamic_cast<const PencilDegenerateError*>(&e) || dynamic_cast<const SingularCurveError*>(&e) ||
         dynamic_cast<const LiftInconsistentError*>(&e) || dynamic_cast<const StructuralError*>(&e) ||
         dynamic_cast<const PathTooCloseError*>(&e) || dynamic_cast<const StepUnderflowError*>(&e);
}

std::string clean(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == ';') ch = ' ';
  }
  return s;
}

void smoothness_probe(const HomogeneousPoly3& p, const SurfaceMesh& mesh) {
  for (const auto& x : mesh.embedding()) {
    if (normalized_gradient(p, x) < 1e-8) throw SingularCurveError("gradient vanishes on the curve");
  }
}

// Meshes and measures one curve, filling the geometric part of the record.
void measure(SampleRecord& rec, const HomogeneousPoly3& p, const Pencil& pencil, int level,
             const ExperimentConfig& config) {
  auto t0 = Clock::now();
  BranchedCover cover(p, pencil);
  rec.branch_count = static_cast<int>(cover.branch_points().size());
  LiftOptions lo;
  lo.level = level;
  LiftedSurface surf = build_surface(cover, lo);
  const SurfaceMesh& mesh = surf.mesh;
  smoothness_probe(p, mesh);
  const EulerGenus eg = euler_genus(mesh);
  rec.genus = eg.genus;
  rec.area = total_area(mesh);
  const CurvatureField k = curvature(mesh);
  rec.gauss_bonnet_error = std::abs(k.total_defect() - 2 * std::numbers::pi * eg.chi);
  rec.curvature_min = k.min_curvature();
  rec.curvature_max = k.max_curvature();
  rec.curvature_smoothed_min = k.min_smoothed();
  rec.curvature_smoothed_max = k.max_smoothed();
  rec.vertices = mesh.n_vertices();
  rec.edges = mesh.n_edges();
  rec.faces = mesh.n_faces();
  rec.min_angle = mesh.min_angle_deg();
  rec.times.mesh = seconds_since(t0);

  t0 = Clock::now();
  const DiscreteLaplacian lap = assemble(mesh);
  const SpectralResult spec = lowest_eigenpairs(lap, config.eigen_count);
  rec.eigenvalues.assign(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.size());
  rec.lambda1 = spec.lambda1();
  rec.lambda1_paper = lambda_to_paper(rec.lambda1);
  rec.max_residual = *std::max_element(spec.residuals.begin(), spec.residuals.end());
  rec.solver_iterations = spec.iterations;
  rec.times.spectrum = seconds_since(t0);

  t0 = Clock::now();
  SweepOptions so;
  so.uniform_levels = config.sweep_levels;
  const CheegerEstimate ce = estimate_cheeger(mesh, spec, rec.curvature_min, so);
  rec.h_upper = ce.h_upper;
  rec.h_lower = ce.h_lower;
  rec.h_upper_paper = h_to_paper(ce.h_upper);
  rec.h_lower_paper = h_to_paper(ce.h_lower);
  rec.cut_length = ce.cut.length;
  rec.times.cheeger = seconds_since(t0);

  if (config.systole && eg.genus > 0) {
    t0 = Clock::now();
    SystoleOptions sopt;
    sopt.threads = 1;
    rec.systole = systole(mesh, sopt).length;
    rec.times.systole = seconds_since(t0);
  }
}

void note_rejection(SampleRecord& rec, const std::string& why) {
  if (!rec.rejections.empty()) rec.rejections += ';';
  rec.rejections += clean(why);
}

}  // namespace

SampleRecord run_kostlan_slot(const ExperimentConfig& config, int degree, int index) {
  SampleRecord rec;
  rec.degree = degree;
  rec.index = index;
  rec.seed = config.seed;
  rec.expected_genus = (degree - 1) * (degree - 2) / 2;
  rec.expected_area = degree * std::numbers::pi;
  rec.expected_branches = degree * (degree - 1);
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    SampleRecord trial = rec;
    trial.stream = kostlan_stream(degree, index, attempt);
    trial.attempts = attempt + 1;
    try {
      const auto t0 = Clock::now();
      const HomogeneousPoly3 p = sample_kostlan(degree, {config.seed, trial.stream});
      const Pencil pencil = Pencil::random(p, {config.seed, trial.stream | kPencilBit});
      trial.times.sample = seconds_since(t0);
      measure(trial, p, pencil, config.level, config);
    } catch (const std::exception& e) {
      if (resample_worthy(e)) {
        note_rejection(rec, e.what());
        rec.attempts = attempt + 1;
        continue;
      }
      trial.accepted = false;
      trial.reason = clean(e.what());
      return trial;
    }
    if (trial.genus != trial.expected_genus || trial.branch_count != trial.expected_branches) {
      trial.reason = "certificate mismatch";
      return trial;
    }
    trial.accepted = true;
    return trial;
  }
  rec.accepted = false;
  rec.reason = "all draws rejected";
  return rec;
}

SampleRecord run_degenerate_slot(const ExperimentConfig& config, double eps) {
  SampleRecord rec;
  rec.family = "degenerate";
  rec.degree = config.d1 + config.d2;
  rec.eps = eps;
  rec.seed = config.seed;
  const int d = rec.degree;
  rec.expected_genus = (d - 1) * (d - 2) / 2;
  rec.expected_area = d * std::numbers::pi;
  rec.expected_branches = d * (d - 1);
  const auto it = std::find(config.eps.begin(), config.eps.end(), eps);
  rec.index = static_cast<int>(it - config.eps.begin());

  HomogeneousPoly3 p1, p2, q;
  if (config.degenerate_kind == "canonical") {
    p1 = monomial({1, 0, 0});
    p2 = monomial({0, 1, 0});
    q = monomial({0, 0, 2});
  } else {
    p1 = sample_kostlan(config.d1, {config.seed, kDegenerateBit | kFactorBit | 1});
    p2 = sample_kostlan(config.d2, {config.seed, kDegenerateBit | kFactorBit | 2});
    q = sample_kostlan(d, {config.seed, kDegenerateBit | kFactorBit | 3});
  }
  const HomogeneousPoly3 p = degenerate_family(p1, p2, q, eps);
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    SampleRecord trial = rec;
    trial.stream = kDegenerateBit | (static_cast<std::uint64_t>(rec.index) << 16) |
                   static_cast<std::uint64_t>(attempt);
    trial.attempts = attempt + 1;
    try {
      const Pencil pencil = Pencil::random(p, {config.seed, trial.stream | kPencilBit});
      measure(trial, p, pencil, config.degenerate_level, config);
    } catch (const std::exception& e) {
      if (resample_worthy(e)) {
        note_rejection(rec, e.what());
        rec.attempts = attempt + 1;
        continue;
      }
      trial.reason = clean(e.what());
      return trial;
    }
    if (trial.genus != trial.expected_genus || trial.branch_count != trial.expected_branches) {
      trial.reason = "certificate mismatch";
      return trial;
    }
    trial.accepted = true;
    return trial;
  }
  rec.reason = "all draws rejected";
  return rec;
}

std::vector<SampleRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::function<SampleRecord()>> jobs;
  for (int d : config.degrees) {
    for (int i = 0; i < config.samples; ++i) {
      jobs.emplace_back([&config, d, i] { return run_kostlan_slot(config, d, i); });
    }
  }
  if (config.degenerate) {
    for (double e : config.eps) {
      jobs.emplace_back([&config, e] { return run_degenerate_slot(config, e); });
    }
  }
  std::vector<SampleRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) out[j] = jobs[j]();
  };
  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

// ---------------------------------------------------------------------------

Quantiles quantiles(std::vector<double> v) {
  Quantiles q;
  q.count = static_cast<int>(v.size());
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  auto at = [&](double p) {
    const double pos = p * (v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  q.min = v.front();
  q.q25 = at(0.25);
  q.median = at(0.5);
  q.q75 = at(0.75);
  q.max = v.back();
  return q;
}

Interval wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0, 1};
  const double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double denom = 1 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Summary summarize(const std::vector<SampleRecord>& records, const ExperimentConfig& config) {
  if (records.empty()) throw DomainError("no records to summarize");
  Summary s;
  std::map<int, std::vector<const SampleRecord*>> by_degree;
  for (const auto& r : records) {
    if (r.family == "degenerate") {
      s.degenerate.push_back(r);
    } else {
      by_degree[r.degree].push_back(&r);
    }
  }
  for (const auto& [d, recs] : by_degree) {
    DegreeSummary ds;
    ds.degree = d;
    ds.requested = static_cast<int>(recs.size());
    if (d >= 2) ds.bounds = bound_calculator(d, config.a_for(d), config.C, config.n);
    std::vector<double> hu, hl, l1, sys;
    int h5 = 0, l10 = 0, l6 = 0, hth = 0, lth = 0;
    for (const auto* r : recs) {
      ds.resampled_draws += r->rejections.empty()
                                ? 0
                                : 1 + static_cast<int>(std::count(r->rejections.begin(), r->rejections.end(), ';'));
      if (!r->accepted) {
        ++ds.rejected;
        continue;
      }
      ++ds.accepted;
      hu.push_back(r->h_upper_paper);
      hl.push_back(r->h_lower_paper);
      l1.push_back(r->lambda1_paper);
      if (r->systole) sys.push_back(length_to_paper(*r->systole));
      h5 += r->h_lower_paper >= std::pow(d, -5.0);
      l10 += r->lambda1_paper >= std::pow(d, -10.0);
      l6 += r->lambda1_paper <= 6;
      if (ds.bounds) {
        hth += r->h_lower_paper >= ds.bounds->h_threshold;
        lth += r->lambda1_paper >= ds.bounds->lambda1_threshold;
      }
    }
    if (ds.accepted > 0) {
      const double n = ds.accepted;
      ds.frac_h_lower_ge_d5 = h5 / n;
      ds.frac_lambda1_ge_d10 = l10 / n;
      ds.frac_lambda1_le_6 = l6 / n;
      ds.frac_h_lower_ge_threshold = hth / n;
      ds.frac_lambda1_ge_threshold = lth / n;
    }
    ds.h_lower_ge_d5_interval = wilson_interval(h5, ds.accepted);
    ds.h_upper = quantiles(hu);
    ds.h_lower = quantiles(hl);
    ds.lambda1 = quantiles(l1);
    ds.systole = quantiles(sys);
    s.degrees.push_back(ds);
  }
  return s;
}

// ---------------------------------------------------------------------------

std::string csv_header() {
  return "family,degree,index,eps,seed,stream,attempts,status,reason,rejections,"
         "genus,expected_genus,branch_count,expected_branches,area,expected_area,"
         "gauss_bonnet_error,lambda1,lambda1_paper,eigenvalues,max_residual,solver_iterations,"
         "h_upper,h_upper_paper,h_lower,h_lower_paper,cut_length,systole,"
         "curvature_min,curvature_max,curvature_smoothed_min,curvature_smoothed_max,vertices,edges,faces,min_angle_deg";
}

void write_csv(std::ostream& out, const std::vector<SampleRecord>& records) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << csv_header() << '\n';
  for (const auto& r : records) {
    s << r.family << ',' << r.degree << ',' << r.index << ',' << r.eps << ',' << r.seed << ','
      << r.stream << ',' << r.attempts << ',' << (r.accepted ? "accepted" : "rejected") << ','
      << r.reason << ',' << r.rejections << ',' << r.genus << ',' << r.expected_genus << ','
      << r.branch_count << ',' << r.expected_branches << ',' << r.area << ',' << r.expected_area
      << ',' << r.gauss_bonnet_error << ',' << r.lambda1 << ',' << r.lambda1_paper << ',';
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      s << (i ? ";" : "") << r.eigenvalues[i];
    }
    s << ',' << r.max_residual << ',' << r.solver_iterations << ',' << r.h_upper << ','
      << r.h_upper_paper << ',' << r.h_lower << ',' << r.h_lower_paper << ',' << r.cut_length
      << ',';
    if (r.systole) s << *r.systole;
    s << ',' << r.curvature_min << ',' << r.curvature_max << ',' << r.curvature_smoothed_min << ','
      << r.curvature_smoothed_max << ',' << r.vertices << ',' << r.edges
      << ',' << r.faces << ',' << r.min_angle << '\n';
  }
  out << s.str();
}

void write_timings(std::ostream& out, const std::vector<SampleRecord>& records) {
  std::ostringstream s;
  s << std::setprecision(6);
  s << "family,degree,index,eps,sample_s,mesh_s,spectrum_s,cheeger_s,systole_s\n";
  for (const auto& r : records) {
    s << r.family << ',' << r.degree << ',' << r.index << ',' << r.eps << ',' << r.times.sample
      << ',' << r.times.mesh << ',' << r.times.spectrum << ',' << r.times.cheeger << ','
      << r.times.systole << '\n';
  }
  out << s.str();
}

namespace {

nlohmann::ordered_json to_json(const Quantiles& q) {
  return {{"count", q.count}, {"min", q.min}, {"q25", q.q25}, {"median", q.median},
          {"q75", q.q75},     {"max", q.max}};
}

}  // namespace

void write_summary_json(std::ostream& out, const Summary& summary, const ExperimentConfig& config) {
  using J = nlohmann::ordered_json;
  J root;
  root["normalization"] = {
      {"note", "quantiles and frequencies use unit-line units: h * sqrt(pi), lambda1 * pi"},
      {"buser_convention", "lambda1 <= 2 a h + 10 h^2, a = sqrt(max(0, -K_min))"},
      {"C", config.C},
      {"a_rule", config.a_rule},
      {"n", config.n}};
  J degrees = J::array();
  for (const auto& d : summary.degrees) {
    J j;
    j["degree"] = d.degree;
    j["requested"] = d.requested;
    j["accepted"] = d.accepted;
    j["rejected"] = d.rejected;
    j["resampled_draws"] = d.resampled_draws;
    j["frac_h_lower_ge_d^-5"] = d.frac_h_lower_ge_d5;
    j["frac_h_lower_ge_d^-5_wilson95"] = {d.h_lower_ge_d5_interval.low, d.h_lower_ge_d5_interval.high};
    j["frac_lambda1_ge_d^-10"] = d.frac_lambda1_ge_d10;
    j["frac_lambda1_le_6"] = d.frac_lambda1_le_6;
    if (d.bounds) {
      const auto& b = *d.bounds;
      j["bounds"] = {{"a_d", b.a_d},
                     {"r_d", b.r_d},
                     {"k_d", b.k_d},
                     {"w_d", b.w_d},
                     {"systole_threshold", b.systole_threshold},
                     {"h_threshold", b.h_threshold},
                     {"lambda1_threshold", b.lambda1_threshold}};
      j["frac_h_lower_ge_h_threshold"] = d.frac_h_lower_ge_threshold;
      j["frac_lambda1_ge_lambda1_threshold"] = d.frac_lambda1_ge_threshold;
    }
    j["h_upper"] = to_json(d.h_upper);
    j["h_lower"] = to_json(d.h_lower);
    j["lambda1"] = to_json(d.lambda1);
    j["systole"] = to_json(d.systole);
    degrees.push_back(j);
  }
  root["degrees"] = degrees;
  J degen = J::array();
  for (const auto& r : summary.degenerate) {
    degen.push_back({{"eps", r.eps},
                     {"status", r.accepted ? "accepted" : "rejected"},
                     {"reason", r.reason},
                     {"h_upper", r.h_upper},
                     {"cut_length", r.cut_length},
                     {"lambda1", r.lambda1},
                     {"h_upper_paper", r.h_upper_paper},
                     {"lambda1_paper", r.lambda1_paper}});
  }
  root["degenerate"] = degen;
  out << root.dump(2) << '\n';
}

}  // namespace rcl
