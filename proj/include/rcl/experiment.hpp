#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcl/bounds.hpp"
#include "rcl/cheeger.hpp"
#include "rcl/kostlan.hpp"
#include "rcl/projective.hpp"
#include "rcl/spectral.hpp"
#include "rcl/surface_mesh.hpp"

namespace rcl {

struct ExperimentConfig {
  // [experiment]
  std::vector<int> degrees{1};
  int samples = 3;
  std::uint64_t seed = 1;
  int threads = 0;        // 0: hardware concurrency
  int max_attempts = 6;   // draws per slot before giving up
  // [mesh]
  int level = 4;
  // [spectrum]
  int eigen_count = 4;
  // [cheeger]
  int sweep_levels = 256;
  bool systole = true;
  // [bounds]
  double C = 1;
  std::string a_rule = "inverse_log";  // or "fixed"
  double a_value = 0.5;                // used by the fixed rule
  int n = 2;
  // [degenerate]
  bool degenerate = false;
  std::string degenerate_kind = "canonical";  // or "random"
  int d1 = 1, d2 = 1;
  std::vector<double> eps{0.1, 0.01, 0.001};
  int degenerate_level = 4;
  // [output]
  std::string csv = "results.csv";
  std::string json = "summary.json";
  std::string timings = "timings.csv";

  /// Sections and keys as above; unknown keys are errors.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);

  /// Throws DomainError on invalid fields.
  void validate() const;
  double a_for(int d) const;
};

struct StageTimes {
  double sample = 0, mesh = 0, spectrum = 0, cheeger = 0, systole = 0;
};

struct SampleRecord {
  std::string family = "kostlan";  // or "degenerate"
  int degree = 0;
  int index = 0;
  double eps = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // stream of the draw the record describes
  int attempts = 0;
  std::string rejections;    // reasons of discarded draws, ';'-separated
  bool accepted = false;
  std::string reason;        // why the slot ended rejected

  int genus = -1, expected_genus = 0;
  double area = 0, expected_area = 0;
  int branch_count = -1, expected_branches = 0;
  double gauss_bonnet_error = 0;
  double lambda1 = 0, lambda1_paper = 0;
  std::vector<double> eigenvalues;
  double max_residual = 0;
  int solver_iterations = 0;
  double h_upper = 0, h_upper_paper = 0;
  double h_lower = 0, h_lower_paper = 0;
  double cut_length = 0;
  std::optional<double> systole;
  double curvature_min = 0, curvature_max = 0;
  double curvature_smoothed_min = 0, curvature_smoothed_max = 0;
  int vertices = 0, edges = 0, faces = 0;
  double min_angle = 0;
  StageTimes times;
};

/// One record per (degree, index) slot plus one per degenerate epsilon,
/// ordered Kostlan slots first by (degree, index), then degenerate ones.
std::vector<SampleRecord> run_experiment(const ExperimentConfig& config);

/// Runs one slot; exposed for tests and the CLI.
SampleRecord run_kostlan_slot(const ExperimentConfig& config, int degree, int index);
SampleRecord run_degenerate_slot(const ExperimentConfig& config, double eps);

struct Quantiles {
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
  int count = 0;
};
Quantiles quantiles(std::vector<double> values);

struct Interval {
  double low = 0, high = 0;
};
/// Wilson score interval at 95%.
Interval wilson_interval(int successes, int trials);

struct DegreeSummary {
  int degree = 0;
  int requested = 0, accepted = 0, rejected = 0, resampled_draws = 0;
  double frac_h_lower_ge_d5 = 0;
  Interval h_lower_ge_d5_interval;
  double frac_lambda1_ge_d10 = 0;
  double frac_lambda1_le_6 = 0;
  double frac_h_lower_ge_threshold = 0;
  double frac_lambda1_ge_threshold = 0;
  std::optional<BoundReport> bounds;
  Quantiles h_upper, h_lower, lambda1, systole;
};

struct Summary {
  std::vector<DegreeSummary> degrees;
  std::vector<SampleRecord> degenerate;
};

/// Throws DomainError on empty input. Degenerate records are kept apart.
Summary summarize(const std::vector<SampleRecord>& records, const ExperimentConfig& config);

/// Column order is fixed; see csv_header().
std::string csv_header();
void write_csv(std::ostream& out, const std::vector<SampleRecord>& records);
void write_timings(std::ostream& out, const std::vector<SampleRecord>& records);
void write_summary_json(std::ostream& out, const Summary& summary, const ExperimentConfig& config);

}  // namespace rcl
