#include "ctlab/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ctlab/parallel.hpp"

namespace ctlab {

namespace {

const Bundle& stable_bundle(const SystemModel& system) {
  if (system.kind() != SystemKind::toral_auto)
    throw Error(ErrorKind::no_smooth_structure, "stable leaves need a toral automorphism");
  return system.bundle("s");
}

LeafDisk make_disk(const TorusPoint& x, const Eigen::VectorXd& v, double R, long long count) {
  if (!(R >= 0)) throw Error(ErrorKind::invalid_argument, "radius must be non-negative");
  if (count < 1) throw Error(ErrorKind::invalid_argument, "sample_count must be >= 1");
  LeafDisk disk;
  disk.center = x;
  disk.radius = R;
  if (R == 0 || count == 1) {
    disk.params = {0.0};
  } else {
    for (long long i = 0; i < count; ++i)
      disk.params.push_back(-R + 2 * R * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  std::vector<double> w(static_cast<std::size_t>(v.size()));
  for (double t : disk.params) {
    for (Eigen::Index j = 0; j < v.size(); ++j) w[static_cast<std::size_t>(j)] = t * v[j];
    disk.samples.push_back(translate(x, w));
  }
  return disk;
}

double wrap(double d) { return d - std::round(d); }

// Nearest-sample queries on the torus through a uniform cell hash.
class CellIndex {
 public:
  CellIndex(int dim, std::vector<std::vector<double>> pts) : d_(dim), pts_(std::move(pts)) {
    const double per = std::pow(static_cast<double>(pts_.size()), 1.0 / d_);
    m_ = std::clamp(static_cast<int>(per / 2), 1, 512);
    for (std::size_t i = 0; i < pts_.size(); ++i) cells_[key(cell_of(pts_[i]))].push_back(i);
  }

  double nearest(const std::vector<double>& q) const {
    const auto c = cell_of(q);
    const double size = 1.0 / m_;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0;; ++k) {
      if (2 * k + 1 >= m_) {
        for (const auto& p : pts_) best = std::min(best, dist(p, q));
        return best;
      }
      visit_ring(c, k, [&](long long cell) {
        auto it = cells_.find(cell);
        if (it == cells_.end()) return;
        for (auto i : it->second) best = std::min(best, dist(pts_[i], q));
      });
      // Cells outside ring k sit at least k cell widths away on some axis.
      if (best <= k * size) return best;
    }
  }

 private:
  std::vector<int> cell_of(const std::vector<double>& p) const {
    std::vector<int> c(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j) {
      double u = p[static_cast<std::size_t>(j)] - std::floor(p[static_cast<std::size_t>(j)]);
      c[static_cast<std::size_t>(j)] = std::min(m_ - 1, static_cast<int>(u * m_));
    }
    return c;
  }
  long long key(const std::vector<int>& c) const {
    long long k = 0;
    for (int j = 0; j < d_; ++j) k = k * m_ + (((c[static_cast<std::size_t>(j)] % m_) + m_) % m_);
    return k;
  }
  template <class Fn>
  void visit_ring(const std::vector<int>& c, int k, Fn&& fn) const {
    std::vector<int> o(static_cast<std::size_t>(d_), -k);
    while (true) {
      int mx = 0;
      for (int v : o) mx = std::max(mx, std::abs(v));
      if (mx == k) {
        std::vector<int> cc(c);
        for (int j = 0; j < d_; ++j) cc[static_cast<std::size_t>(j)] += o[static_cast<std::size_t>(j)];
        fn(key(cc));
      }
      int j = 0;
      while (j < d_ && ++o[static_cast<std::size_t>(j)] > k) o[static_cast<std::size_t>(j++)] = -k;
      if (j == d_) return;
    }
  }
  double dist(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0;
    for (int j = 0; j < d_; ++j) {
      const double t = wrap(a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)]);
      s += t * t;
    }
    return std::sqrt(s);
  }

  int d_, m_ = 1;
  std::vector<std::vector<double>> pts_;
  std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

MinimalityReport check_direction(const Eigen::VectorXd& v, double R, double eps, const std::vector<Point>& seeds,
                                 const MinimalityOptions& options) {
  if (!(R >= 0) || !(eps > 0) || !(options.spacing > 0))
    throw Error(ErrorKind::invalid_argument, "need R >= 0, eps > 0, spacing > 0");
  if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "no seed points");
  const int d = static_cast<int>(v.size());
  static constexpr int kAuto[] = {64, 64, 24, 12, 8};
  const int per = options.per_axis > 0 ? options.per_axis : kAuto[std::min(d, 4)];
  const auto targets = target_grid(d, per);
  const auto half = static_cast<long long>(std::floor(R / options.spacing + 1e-9));

  MinimalityReport rep;
  rep.R = R;
  rep.eps = eps;
  rep.targets = static_cast<long long>(targets.size());
  rep.seeds.resize(seeds.size());
  parallel_for(seeds.size(), options.workers, [&](std::size_t s) {
    const auto& x = std::get<TorusPoint>(seeds[s]);
    if (x.dim != d) throw Error(ErrorKind::mismatched_variants, "seed dimension does not match the leaf direction");
    const auto c = coordinates(x);
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long long j = -half; j <= half; ++j) {
      std::vector<double> p(c);
      const double t = static_cast<double>(j) * options.spacing;
      for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] += t * v[i];
      pts.push_back(std::move(p));
    }
    SeedGap& g = rep.seeds[s];
    g.seed = seeds[s];
    g.samples = static_cast<long long>(pts.size());
    const CellIndex index(d, std::move(pts));
    for (const auto& q : targets) {
      const double gap = index.nearest(q);
      if (gap > g.worst_gap) {
        g.worst_gap = gap;
        g.worst_target = q;
      }
    }
  });
  for (const auto& g : rep.seeds) rep.worst_gap = std::max(rep.worst_gap, g.worst_gap);
  rep.dense = rep.worst_gap < eps;
  return rep;
}

template <class Check>
RadiusSearch search_radius(Check&& check, const RadiusSearchOptions& search) {
  if (!(search.R_start > 0) || !(search.R_max >= search.R_start) || !(search.rel_tol > 0))
    throw Error(ErrorKind::invalid_argument, "bad radius search bounds");
  RadiusSearch out;
  auto run = [&](double R) {
    const auto rep = check(R);
    out.trace.push_back({R, rep.worst_gap, rep.dense});
    return rep.dense;
  };
  double lo = 0.0, hi = search.R_start;
  while (!run(hi)) {
    lo = hi;
    if (hi >= search.R_max) return out;
    hi = std::min(2 * hi, search.R_max);
  }
  while (hi - lo > search.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (run(mid) ? hi : lo) = mid;
  }
  out.R0 = hi;
  return out;
}

}  // namespace

LeafDisk stable_leaf_disk(const SystemModel& system, const Point& x, double R, long long sample_count) {
  const auto& b = stable_bundle(system);
  system.validate(x);
  return make_disk(std::get<TorusPoint>(x), b.direction, R, sample_count);
}

LeafDisk line_disk(const TorusPoint& x, const Eigen::VectorXd& direction, double R, long long sample_count) {
  if (direction.size() != x.dim || !(direction.norm() > 0))
    throw Error(ErrorKind::invalid_argument, "direction must be nonzero with the point's dimension");
  LeafDisk disk = make_disk(x, direction.normalized(), R, sample_count);
  disk.label = "line";
  return disk;
}

std::vector<std::vector<double>> target_grid(int dim, int per_axis) {
  if (dim < 1 || per_axis < 1) throw Error(ErrorKind::invalid_argument, "bad target grid");
  std::vector<std::vector<double>> out;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) p[static_cast<std::size_t>(j)] = (idx[static_cast<std::size_t>(j)] + 0.5) / per_axis;
    out.push_back(std::move(p));
    int j = 0;
    while (j < dim && ++idx[static_cast<std::size_t>(j)] == per_axis) idx[static_cast<std::size_t>(j++)] = 0;
    if (j == dim) return out;
  }
}

MinimalityReport eps_minimality_check(const SystemModel& system, double R, double eps,
                                      const std::vector<Point>& seeds, const MinimalityOptions& options) {
  const auto& b = stable_bundle(system);
  for (const auto& s : seeds) system.validate(s);
  return check_direction(b.direction, R, eps, seeds, options);
}

MinimalityReport line_minimality_check(const Eigen::VectorXd& direction, double R, double eps,
                                       const std::vector<Point>& seeds, const MinimalityOptions& options) {
  if (!(direction.norm() > 0)) throw Error(ErrorKind::invalid_argument, "direction must be nonzero");
  return check_direction(direction.normalized(), R, eps, seeds, options);
}

RadiusSearch minimal_radius_search(const SystemModel& system, double eps, const std::vector<Point>& seeds,
                                   const MinimalityOptions& options, const RadiusSearchOptions& search) {
  return search_radius([&](double R) { return eps_minimality_check(system, R, eps, seeds, options); }, search);
}

RadiusSearch minimal_radius_search(const Eigen::VectorXd& direction, double eps, const std::vector<Point>& seeds,
                                   const MinimalityOptions& options, const RadiusSearchOptions& search) {
  return search_radius([&](double R) { return line_minimality_check(direction, R, eps, seeds, options); }, search);
}

}  // namespace ctlab
