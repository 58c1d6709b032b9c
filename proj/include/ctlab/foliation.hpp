#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctlab/systems.hpp"

namespace ctlab {

struct LeafDisk {
  Point center;
  std::string label = "s";
  double radius = 0.0;
  std::vector<double> params;  // leaf coordinate t of each sample
  std::vector<Point> samples;  // center + t v mod 1
};

/// Uniform samples of {x + t v_s mod 1 : |t| <= R}. R = 0 gives the center
/// alone; sample_count = 2 gives the two endpoints.
LeafDisk stable_leaf_disk(const SystemModel& system, const Point& x, double R, long long sample_count);

/// Same construction along an arbitrary direction (normalised). Used for
/// controls whose leaves are closed.
LeafDisk line_disk(const TorusPoint& x, const Eigen::VectorXd& direction, double R, long long sample_count);

struct MinimalityOptions {
  double spacing = 0.005;  // leaf lattice t = j * spacing, |t| <= R
  int per_axis = 0;        // target grid points per axis; 0 picks 64, 24, 12, 8 for d = 1..4
  int workers = 1;
};

struct SeedGap {
  Point seed;
  double worst_gap = 0.0;
  std::vector<double> worst_target;
  long long samples = 0;
};

struct MinimalityReport {
  double R = 0.0, eps = 0.0;
  bool dense = false;  // every target within eps (strict) of the leaf, for every seed
  double worst_gap = 0.0;
  long long targets = 0;
  std::vector<SeedGap> seeds;
};

/// Target grid: cell centres (i + 1/2) / m per axis.
std::vector<std::vector<double>> target_grid(int dim, int per_axis);

MinimalityReport eps_minimality_check(const SystemModel& system, double R, double eps,
                                      const std::vector<Point>& seeds, const MinimalityOptions& options = {});
MinimalityReport line_minimality_check(const Eigen::VectorXd& direction, double R, double eps,
                                       const std::vector<Point>& seeds, const MinimalityOptions& options = {});

struct RadiusStep {
  double R = 0.0, worst_gap = 0.0;
  bool dense = false;
};

struct RadiusSearch {
  std::optional<double> R0;  // smallest dense radius found, within rel_tol
  std::vector<RadiusStep> trace;
};

struct RadiusSearchOptions {
  double R_start = 1.0;
  double R_max = 1000.0;
  double rel_tol = 1e-3;
};

/// Doubling from R_start until dense (or past R_max), then bisection.
RadiusSearch minimal_radius_search(const SystemModel& system, double eps, const std::vector<Point>& seeds,
                                   const MinimalityOptions& options = {}, const RadiusSearchOptions& search = {});
RadiusSearch minimal_radius_search(const Eigen::VectorXd& direction, double eps, const std::vector<Point>& seeds,
                                   const MinimalityOptions& options = {}, const RadiusSearchOptions& search = {});

}  // namespace ctlab
