#include "ctlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "ctlab/parallel.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

namespace {

constexpr std::uint64_t kPointStream = 0xc11;
constexpr std::uint64_t kSegmentStream = 0xc12;

const std::set<std::string> kCommonKeys = {"experiment", "system", "potential", "seed", "workers", "out"};

const std::map<std::string, std::set<std::string>>& subcommand_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"pressure", {"delta", "eps", "n_range", "grid", "sampling", "check_delta_monotonicity"}},
      {"entropy-gap",
       {"entropy_deltas", "entropy_n", "grid", "unstable_delta", "unstable_n", "disk_radius", "seeds"}},
      {"decompose", {"r", "split_index", "segments", "random"}},
      {"bowen-check", {"eps", "r", "split_index", "bowen", "random", "sampling", "filter_G"}},
      {"spec-check", {"delta", "pairs", "max_n", "segments_per_trial", "max_gap", "r", "split_index"}},
      {"expansivity", {"eps", "N", "seeds", "flag_ratio", "directions", "delta", "n_range", "grid"}},
      {"minimality", {"eps", "R", "seeds", "points", "spacing", "per_axis", "direction", "search"}},
      {"ct-report",
       {"delta", "eps", "r", "a_param", "split_index", "n_range", "grid", "sampling", "bowen", "bowen_segments",
        "bowen_max_n", "spec_pairs", "spec_max_n", "pexp"}},
  };
  return keys;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::invalid_config, what); }

double positive(const json& j, const std::string& key) {
  const double v = read_real(j, key);
  if (!(v > 0) || !std::isfinite(v)) bad("'" + key + "' must be a positive number");
  return v;
}

double positive(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? positive(j, key) : fallback;
}

template <class T>
T integer(const json& j, const std::string& key, T fallback, T min_value = 1) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) bad("'" + key + "' must be an integer");
  const T x = v.get<T>();
  if (x < min_value) bad("'" + key + "' must be >= " + std::to_string(min_value));
  return x;
}

std::uint64_t config_seed(const json& c) {
  if (!c.contains("seed")) return 0;
  const auto& v = c.at("seed");
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    char* end = nullptr;
    const auto x = std::strtoull(s.c_str(), &end, 10);
    if (!s.empty() && end == s.c_str() + s.size()) return x;
  }
  bad("'seed' must be a non-negative integer");
}

GridSpec grid_from_json(const json& c) {
  GridSpec g;
  if (!c.contains("grid")) return g;
  const auto& j = c.at("grid");
  if (!j.is_object()) bad("'grid' must be an object");
  if (j.contains("center")) {
    g.center.clear();
    for (const auto& v : j.at("center")) g.center.push_back(v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>());
  }
  g.patch_cells = integer(j, "patch_cells", g.patch_cells);
  g.reference_n = integer(j, "reference_n", g.reference_n);
  g.oversample = positive(j, "oversample", g.oversample);
  g.contracting_points = integer(j, "contracting_points", g.contracting_points);
  g.word_length = integer(j, "word_length", g.word_length, 0);
  g.max_candidates = integer<long long>(j, "max_candidates", g.max_candidates);
  return g;
}

BallSampling sampling_from_json(const json& c, std::uint64_t seed) {
  BallSampling s;
  s.seed = seed;
  if (!c.contains("sampling")) return s;
  const auto& j = c.at("sampling");
  s.samples = integer(j, "samples", s.samples);
  s.min_rung = integer(j, "min_rung", s.min_rung, 0);
  s.max_rung = integer(j, "max_rung", s.max_rung, s.min_rung);
  return s;
}

std::vector<long long> n_range(const json& c, std::vector<long long> fallback) {
  return c.contains("n_range") ? n_range_from_json(c.at("n_range")) : fallback;
}

std::vector<Point> seed_points(const SystemModel& system, const json& c, std::uint64_t seed, int fallback) {
  std::vector<Point> out;
  if (c.contains("points")) {
    for (const auto& p : c.at("points")) out.push_back(point_from_json(system, p));
    if (out.empty()) bad("'points' is empty");
    return out;
  }
  const int count = integer(c, "seeds", fallback);
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, kPointStream, static_cast<std::uint64_t>(i));
    out.push_back(random_point(system, rng));
  }
  return out;
}

std::vector<Segment> segments_from_json(const SystemModel& system, const json& c, std::uint64_t seed,
                                        int default_count, long long default_max_n) {
  std::vector<Segment> out;
  if (c.contains("segments")) {
    for (const auto& s : c.at("segments")) {
      if (!s.contains("point")) bad("segment without 'point'");
      out.push_back({point_from_json(system, s.at("point")), integer<long long>(s, "n", 0, 0)});
    }
    return out;
  }
  json r = c.value("random", json::object());
  const int count = integer(r, "count", default_count);
  const long long max_n = integer<long long>(r, "max_n", default_max_n);
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, kSegmentStream, static_cast<std::uint64_t>(i));
    out.push_back(random_segment(system, rng, max_n));
  }
  return out;
}

std::optional<CentralObservables> observables(const SystemModel& system, int split_index) {
  if (system.has_splitting() && system.central_labels().size() >= 2) return central_observables(system, split_index);
  return std::nullopt;
}

json run_pressure(const SystemModel& sys, const Potential& pot, const json& c, std::uint64_t seed, int workers) {
  PressureOptions po;
  po.grid = grid_from_json(c);
  po.sampling = sampling_from_json(c, seed);
  po.workers = workers;
  po.check_delta_monotonicity = c.value("check_delta_monotonicity", false);
  const auto est = pressure_at_scale(sys, pot, accept_all, positive(c, "delta"), positive(c, "eps"),
                                     n_range_from_json(c.at("n_range")), po);
  json out{{"estimate", to_json(est)}};
  if (sys.kind() == SystemKind::full_shift) {
    try {
      out["exact"] = decimal(transfer_pressure_oracle(sys.symbols(), pot));
    } catch (const Error&) {
    }
  }
  return out;
}

json run_entropy_gap(const SystemModel& sys, const Potential& pot, const json& c, std::uint64_t seed, int workers) {
  EntropyGapConfig g;
  if (c.contains("entropy_deltas")) {
    g.entropy_deltas.clear();
    for (const auto& v : c.at("entropy_deltas")) {
      const double d = v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
      if (!(d > 0)) bad("entropy_deltas must be positive");
      g.entropy_deltas.push_back(d);
    }
  }
  if (c.contains("entropy_n")) g.entropy_n = n_range_from_json(c.at("entropy_n"));
  if (c.contains("unstable_n")) g.unstable_n = n_range_from_json(c.at("unstable_n"));
  g.pressure.grid = grid_from_json(c);
  g.pressure.workers = workers;
  g.unstable_delta = positive(c, "unstable_delta", g.unstable_delta);
  g.disk_radius = positive(c, "disk_radius", g.disk_radius);
  g.seeds = integer(c, "seeds", g.seeds);
  g.seed = seed;
  return to_json(entropy_gap_report(sys, pot, g));
}

json run_decompose(const SystemModel& sys, const json& c, std::uint64_t seed, int workers) {
  const double r = positive(c, "r");
  const auto obs = central_observables(sys, integer(c, "split_index", 1));
  const auto segs = segments_from_json(sys, c, seed, 100, 20);
  std::vector<json> rows(segs.size());
  parallel_for(segs.size(), workers, [&](std::size_t i) {
    const auto& s = segs[i];
    const auto t = decompose(sys, obs, s.x, s.n, r);
    const auto m = classify(sys, obs, s.x, s.n, r);
    rows[i] = {{"x", point_to_json(s.x)},
               {"n", s.n},
               {"r", decimal(r)},
               {"p", t.p},
               {"g", t.g},
               {"s", t.s},
               {"flags", {{"in_P", m.in_P}, {"in_G", m.in_G}, {"in_S", m.in_S}}}};
  });
  return {{"segments", rows}};
}

json run_bowen(const SystemModel& sys, const Potential& pot, const json& c, std::uint64_t seed, int workers) {
  const double eps = positive(c, "eps");
  BowenPropertyConfig bc;
  bc.r = positive(c, "r");
  bc.Q = pot.holder_Q();
  bc.alpha = pot.holder_alpha();
  bc.C = sys.kind() == SystemKind::toral_auto ? sys.condition_number() : 1.0;
  bc.delta0 = eps;
  if (c.contains("bowen")) {
    bc.C = positive(c.at("bowen"), "C", bc.C);
    bc.delta0 = positive(c.at("bowen"), "delta0", bc.delta0);
  }
  std::optional<CentralObservables> obs;
  if (c.value("filter_G", true)) obs = observables(sys, integer(c, "split_index", 1));
  const auto segs = segments_from_json(sys, c, seed, 40, 40);
  return to_json(bowen_property_check(sys, pot, segs, eps, bc, sampling_from_json(c, seed), obs ? &*obs : nullptr,
                                      workers));
}

json run_spec(const SystemModel& sys, const json& c, std::uint64_t seed, int workers) {
  const double delta = positive(c, "delta");
  const int pairs = integer(c, "pairs", 100);
  const long long max_n = integer<long long>(c, "max_n", 20);
  const int per = integer(c, "segments_per_trial", 2);
  const long long max_gap = integer<long long>(c, "max_gap", 64, 0);
  std::optional<CentralObservables> obs;
  double r = 0;
  if (c.contains("r")) {
    r = positive(c, "r");
    obs = observables(sys, integer(c, "split_index", 1));
  }
  auto good = [&](const Segment& s) { return !obs || classify(sys, *obs, s.x, s.n, r).in_G; };

  std::vector<std::vector<Segment>> trials;
  for (int i = 0; trials.size() < static_cast<std::size_t>(pairs) && i < 100 * pairs; ++i) {
    Rng rng(seed, kSegmentStream, static_cast<std::uint64_t>(i));
    std::vector<Segment> t;
    for (int k = 0; k < per; ++k) t.push_back(random_segment(sys, rng, max_n));
    if (std::all_of(t.begin(), t.end(), good)) trials.push_back(std::move(t));
  }
  std::vector<SpecificationResult> res(trials.size());
  parallel_for(trials.size(), workers, [&](std::size_t i) { res[i] = specification_search(sys, trials[i], delta, max_gap); });

  long long ok = 0, worst = 0, predicted = 0;
  json rows = json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    ok += res[i].ok;
    for (auto g : res[i].gaps) worst = std::max(worst, g);
    predicted = res[i].predicted_gap;
    json lens = json::array();
    for (const auto& s : trials[i]) lens.push_back(s.n);
    rows.push_back({{"ok", res[i].ok},
                    {"lengths", lens},
                    {"gaps", res[i].gaps},
                    {"distances", json(res[i].distances.size(), nullptr)},
                    {"note", res[i].note}});
    for (std::size_t k = 0; k < res[i].distances.size(); ++k) rows.back()["distances"][k] = decimal(res[i].distances[k]);
  }
  const double rate = trials.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(trials.size());
  return {{"delta", decimal(delta)},   {"trials", static_cast<long long>(trials.size())},
          {"success_rate", decimal(rate)}, {"max_gap", worst},
          {"predicted_gap", predicted}, {"results", rows}};
}

PexpOptions pexp_from_json(const json& j, std::uint64_t seed, int workers, const GridSpec& grid) {
  PexpOptions pe;
  pe.seeds = integer(j, "seeds", pe.seeds);
  pe.N = integer<long long>(j, "N", pe.N);
  pe.flag_ratio = positive(j, "flag_ratio", pe.flag_ratio);
  pe.grid.directions = integer(j, "directions", pe.grid.directions, 0);
  pe.grid.seed = seed;
  pe.delta = positive(j, "delta", pe.delta);
  if (j.contains("n_range")) pe.n_range = n_range_from_json(j.at("n_range"));
  pe.pressure.grid = grid;
  pe.pressure.workers = workers;
  pe.seed = seed;
  return pe;
}

json run_expansivity(const SystemModel& sys, const Potential& pot, const json& c, std::uint64_t seed, int workers) {
  const double eps = positive(c, "eps");
  return to_json(pexp_obstruction_estimate(sys, pot, eps, pexp_from_json(c, seed, workers, grid_from_json(c))));
}

json run_minimality(const SystemModel& sys, const json& c, std::uint64_t seed, int workers) {
  const double eps = positive(c, "eps");
  MinimalityOptions mo;
  mo.spacing = positive(c, "spacing", mo.spacing);
  mo.per_axis = integer(c, "per_axis", mo.per_axis, 0);
  mo.workers = workers;
  const auto seeds = seed_points(sys, c, seed, 4);
  std::optional<Eigen::VectorXd> dir;
  if (c.contains("direction")) {
    const auto& d = c.at("direction");
    if (!d.is_array() || static_cast<int>(d.size()) != sys.dim()) bad("'direction' must match the torus dimension");
    dir = Eigen::VectorXd(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) {
      const auto& v = d.at(static_cast<std::size_t>(i));
      (*dir)[i] = v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
    }
  }
  auto check = [&](double R) {
    return dir ? line_minimality_check(*dir, R, eps, seeds, mo) : eps_minimality_check(sys, R, eps, seeds, mo);
  };
  json out{{"leaf", dir ? "line" : "s"}};
  if (c.contains("R")) {
    const double R = read_real(c, "R");
    if (!(R >= 0)) bad("'R' must be non-negative");
    out["check"] = to_json(check(R));
    return out;
  }
  RadiusSearchOptions so;
  if (c.contains("search")) {
    const auto& s = c.at("search");
    so.R_start = positive(s, "R_start", so.R_start);
    so.R_max = positive(s, "R_max", so.R_max);
    so.rel_tol = positive(s, "rel_tol", so.rel_tol);
  }
  const auto found = dir ? minimal_radius_search(*dir, eps, seeds, mo, so) : minimal_radius_search(sys, eps, seeds, mo, so);
  out["search"] = to_json(found);
  out["check"] = to_json(check(found.R0.value_or(so.R_max)));
  return out;
}

CTConfig ct_config_from_json(const json& c, std::uint64_t seed, int workers) {
  CTConfig k;
  k.delta = positive(c, "delta");
  k.eps = positive(c, "eps");
  k.r = positive(c, "r");
  k.a_param = positive(c, "a_param");
  k.split_index = integer(c, "split_index", k.split_index);
  k.n_range = n_range(c, k.n_range);
  k.pressure.grid = grid_from_json(c);
  k.pressure.sampling = sampling_from_json(c, seed);
  k.bowen_sampling = k.pressure.sampling;
  if (c.contains("bowen")) {
    const auto& b = c.at("bowen");
    k.bowen_from_system = !(b.contains("C") || b.contains("delta0"));
    k.bowen.C = positive(b, "C", k.bowen.C);
    k.bowen.delta0 = positive(b, "delta0", k.bowen.delta0);
  }
  k.bowen_segments = integer(c, "bowen_segments", k.bowen_segments);
  k.bowen_max_n = integer<long long>(c, "bowen_max_n", k.bowen_max_n);
  k.spec_pairs = integer(c, "spec_pairs", k.spec_pairs);
  k.spec_max_n = integer<long long>(c, "spec_max_n", k.spec_max_n);
  k.pexp = pexp_from_json(c.value("pexp", json::object()), seed, workers, k.pressure.grid);
  k.seed = seed;
  k.workers = workers;
  return k;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Table helpers: payload values are decimal strings or plain JSON scalars.
std::string g6(const json& v) {
  double x = 0;
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return s;
  } else if (v.is_number()) {
    x = v.get<double>();
  } else {
    return v.dump();
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string bracket6(const json& b) { return "[" + g6(b.at("lo")) + ", " + g6(b.at("hi")) + "]"; }

class Table {
 public:
  void row(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  std::string str() const {
    std::size_t w = 0;
    for (const auto& [k, v] : rows_) w = std::max(w, k.size());
    std::ostringstream os;
    for (const auto& [k, v] : rows_) os << k << std::string(w - k.size() + 2, ' ') << v << '\n';
    return os.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

void pressure_rows(Table& t, const json& e, const std::string& prefix = "") {
  t.row(prefix + "bracket", bracket6(e.at("bracket")));
  t.row(prefix + "delta / eps", g6(e.at("delta")) + " / " + g6(e.at("eps")));
  t.row(prefix + "fit window", std::to_string(e.at("fit_min").get<long long>()) + ".." +
                                   std::to_string(e.at("fit_max").get<long long>()));
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"pressure",    "entropy-gap", "decompose",  "bowen-check",
                                                 "spec-check",  "expansivity", "minimality", "ct-report"};
  return names;
}

json canonical_config(const json& config, const RunOptions& options) {
  if (!config.is_object()) bad("config must be a JSON object");
  json c = resolve_references(config, options.base_dir);
  c.erase("workers");
  c.erase("out");
  if (options.seed) c["seed"] = *options.seed;
  return c;
}

json run_payload(const std::string& sub, const json& c, int workers) {
  const auto keys = subcommand_keys().find(sub);
  if (keys == subcommand_keys().end()) bad("unknown subcommand '" + sub + "'");
  for (const auto& [k, v] : c.items())
    if (!kCommonKeys.count(k) && !keys->second.count(k)) bad("unknown key '" + k + "' for " + sub);
  if (!c.contains("system") || !c.at("system").is_object()) bad("missing 'system'");
  const SystemModel sys = system_from_json(c.at("system"));
  const Potential pot = c.contains("potential") ? potential_from_json(c.at("potential")) : Potential::zero();
  const std::uint64_t seed = config_seed(c);
  if (workers < 1) workers = 1;

  if (sub == "pressure") {
    if (!c.contains("n_range")) bad("missing 'n_range'");
    return run_pressure(sys, pot, c, seed, workers);
  }
  if (sub == "entropy-gap") return run_entropy_gap(sys, pot, c, seed, workers);
  if (sub == "decompose") return run_decompose(sys, c, seed, workers);
  if (sub == "bowen-check") return run_bowen(sys, pot, c, seed, workers);
  if (sub == "spec-check") return run_spec(sys, c, seed, workers);
  if (sub == "expansivity") return run_expansivity(sys, pot, c, seed, workers);
  if (sub == "minimality") return run_minimality(sys, c, seed, workers);
  return to_json(ct_report(sys, pot, ct_config_from_json(c, seed, workers)));
}

std::string render_table(const std::string& sub, const json& p) {
  Table t;
  t.row("subcommand", sub);
  if (sub == "pressure") {
    pressure_rows(t, p.at("estimate"));
    if (p.contains("exact")) t.row("exact", g6(p.at("exact")));
    for (const auto& s : p.at("estimate").at("samples"))
      t.row("n=" + std::to_string(s.at("n").get<long long>()), g6(s.at("log_lower")) + "  " + g6(s.at("log_upper")));
  } else if (sub == "entropy-gap") {
    for (const char* k : {"h_top", "h_u", "h_s", "margin_bracket"}) t.row(k, bracket6(p.at(k)));
    t.row("sup / inf phi", g6(p.at("sup_phi")) + " / " + g6(p.at("inf_phi")));
    t.row("margin", g6(p.at("margin")));
    t.row("holds", p.at("holds").dump());
  } else if (sub == "decompose") {
    t.row("segments", std::to_string(p.at("segments").size()));
    for (const auto& s : p.at("segments")) {
      const auto& f = s.at("flags");
      t.row("n=" + std::to_string(s.at("n").get<long long>()),
            "p=" + std::to_string(s.at("p").get<long long>()) + " g=" + std::to_string(s.at("g").get<long long>()) +
                " s=" + std::to_string(s.at("s").get<long long>()) + (f.at("in_P").get<bool>() ? " P" : "") +
                (f.at("in_G").get<bool>() ? " G" : "") + (f.at("in_S").get<bool>() ? " S" : ""));
    }
  } else if (sub == "bowen-check") {
    t.row("empirical sup", g6(p.at("empirical_sup")));
    t.row("K", g6(p.at("K")));
    t.row("holds", p.at("holds").dump());
    t.row("segments / skipped", std::to_string(p.at("segments").get<long long>()) + " / " +
                                    std::to_string(p.at("skipped_not_in_G").get<long long>()));
  } else if (sub == "spec-check") {
    t.row("trials", std::to_string(p.at("trials").get<long long>()));
    t.row("success rate", g6(p.at("success_rate")));
    t.row("max gap / predicted", std::to_string(p.at("max_gap").get<long long>()) + " / " +
                                     std::to_string(p.at("predicted_gap").get<long long>()));
  } else if (sub == "expansivity") {
    t.row("empty", p.at("empty").dump());
    for (std::size_t i = 0; i < p.at("seeds").size(); ++i) {
      const auto& s = p.at("seeds")[i];
      t.row("seed " + std::to_string(i), "late ratio " + g6(s.at("late_ratio")) + (s.at("flagged").get<bool>() ? " flagged" : ""));
    }
    if (p.contains("pressure")) pressure_rows(t, p.at("pressure"), "pexp ");
  } else if (sub == "minimality") {
    if (p.contains("search")) {
      const auto& s = p.at("search");
      t.row("R0", s.at("found").get<bool>() ? g6(s.at("R0")) : std::string("not found"));
    }
    const auto& k = p.at("check");
    t.row("R", g6(k.at("R")));
    t.row("eps", g6(k.at("eps")));
    t.row("worst gap", g6(k.at("worst_gap")));
    t.row("dense", k.at("dense").dump());
  } else {
    t.row("delta / eps", g6(p.at("delta")) + " / " + g6(p.at("eps")));
    t.row("scale ok", p.at("scale_ok").dump());
    if (p.contains("pressure_all")) t.row("P(all)", bracket6(p.at("pressure_all").at("bracket")));
    t.row("P(bad)", p.contains("pressure_bad") ? bracket6(p.at("pressure_bad").at("bracket"))
                                              : std::string(p.at("bad_empty").get<bool>() ? "empty" : "n/a"));
    t.row("a", g6(p.at("a_param")));
    for (const auto& [k, v] : p.at("verdicts").items()) t.row(k, v.get<std::string>());
    t.row("all pass", p.at("all_pass").dump());
    for (const auto& n : p.at("notes")) t.row("note", n.get<std::string>());
  }
  return t.str();
}

RunResult run(const std::string& sub, const json& config, const RunOptions& options) {
  RunResult res;
  std::filesystem::path out = "results.jsonl";
  int workers = 1;
  json canon;
  try {
    if (config.is_object() && config.contains("out")) out = config.at("out").get<std::string>();
    if (config.is_object() && config.contains("workers")) workers = config.at("workers").get<int>();
    if (options.out) out = *options.out;
    if (options.workers > 0) workers = options.workers;
    canon = canonical_config(config, options);
    res.payload = run_payload(sub, canon, workers);
  } catch (const Error& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  } catch (const json::exception& e) {
    res.exit_code = 2;
    res.error = std::string("invalid-config: ") + e.what();
    return res;
  }
  res.config_hash = hex64(fnv1a(canon.dump()));
  if (sub == "ct-report" && !res.payload.at("all_pass").get<bool>()) res.exit_code = 1;

  json record{{"experiment", canon.value("experiment", sub + "-" + res.config_hash.substr(0, 8))},
              {"timestamp", options.timestamp.empty() ? utc_now() : options.timestamp},
              {"config_hash", res.config_hash},
              {"tool_version", kToolVersion},
              {"subcommand", sub},
              {"payload", res.payload}};
  res.record = seal_record(std::move(record));
  std::ofstream f(out, std::ios::app | std::ios::binary);
  if (!f || !(f << res.record << '\n') || !f.flush()) {
    res.exit_code = 2;
    res.error = "cannot append to " + out.string();
    res.record.clear();
    return res;
  }
  res.table = render_table(sub, res.payload);
  return res;
}

}  // namespace ctlab
