#include "ctlab/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <algorithm>

namespace ctlab {

std::string decimal(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

double parse_real(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) return x;
  }
  throw Error(ErrorKind::invalid_config, "'" + key + "' is not a real number");
}

std::vector<double> real_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw Error(ErrorKind::invalid_config, "'" + key + "' must be a list");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(parse_real(v, key));
  return out;
}

json reals(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(decimal(x));
  return a;
}

template <class T>
T required(const json& j, const std::string& key) {
  if (!j.contains(key)) throw Error(ErrorKind::invalid_config, "missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::invalid_config, "'" + key + "' has the wrong type");
  }
}

}  // namespace

double read_real(const json& j, const std::string& key) {
  if (!j.contains(key)) throw Error(ErrorKind::invalid_config, "missing '" + key + "'");
  return parse_real(j.at(key), key);
}

double read_real(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? parse_real(j.at(key), key) : fallback;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

SystemModel system_from_json(const json& j) {
  const auto kind = required<std::string>(j, "kind");
  SystemModel s = [&] {
    if (kind == "full_shift") return SystemModel::full_shift(required<int>(j, "symbols"));
    if (kind == "expanding_circle") return SystemModel::expanding_circle(required<int>(j, "k"));
    if (kind == "toral") {
      const auto m = required<std::vector<std::vector<long long>>>(j, "matrix");
      std::optional<double> xi;
      if (j.contains("xi")) xi = read_real(j, "xi");
      return SystemModel::toral(m, xi, j.value("labels", std::vector<std::string>{}), j.value("allow_neutral", false));
    }
    if (kind == "cocycle_toy") {
      std::map<std::string, ToySequence> seqs;
      const json seq_doc = required<json>(j, "sequences");
      if (!seq_doc.is_object()) throw Error(ErrorKind::invalid_config, "'sequences' must be an object");
      for (const auto& [label, v] : seq_doc.items()) {
        ToySequence t;
        if (v.contains("forward")) t.forward = real_list(v.at("forward"), label + ".forward");
        if (v.contains("backward")) t.backward = real_list(v.at("backward"), label + ".backward");
        seqs.emplace(label, std::move(t));
      }
      return SystemModel::cocycle_toy(std::move(seqs), read_real(j, "spacing", 1.0));
    }
    throw Error(ErrorKind::invalid_config, "unknown system kind '" + kind + "'");
  }();
  return j.value("inverse", false) ? s.inverse() : s;
}

Potential potential_from_json(const json& j) {
  const auto kind = required<std::string>(j, "kind");
  Potential p = [&] {
    if (kind == "zero") return Potential::zero();
    if (kind == "constant") return Potential::constant(read_real(j, "c"));
    if (kind == "trig") {
      std::vector<TrigTerm> terms;
      for (const auto& t : required<json>(j, "terms"))
        terms.push_back({read_real(t, "a"), required<std::vector<long long>>(t, "k"),
                         read_real(t, "phase", 0.0)});
      return Potential::trig(std::move(terms));
    }
    if (kind == "locally_constant")
      return Potential::locally_constant(required<int>(j, "k"), required<int>(j, "m"),
                                         real_list(required<json>(j, "values"), "values"));
    throw Error(ErrorKind::invalid_config, "unknown potential kind '" + kind + "'");
  }();
  if (j.contains("holder_Q")) p = p.with_holder(read_real(j, "holder_Q"), read_real(j, "holder_alpha", 1.0));
  return p;
}

Point point_from_json(const SystemModel& system, const json& j) {
  Point p;
  switch (system.kind()) {
    case SystemKind::full_shift:
      p = ShiftPoint{j.value("lo", 0), required<std::vector<std::uint8_t>>(j, "symbols")};
      break;
    case SystemKind::cocycle_toy:
      p = ToyPoint{required<long long>(j, "index")};
      break;
    default: {
      const auto c = real_list(required<json>(j, "coords"), "coords");
      p = torus_point(c);
    }
  }
  system.validate(p);
  return p;
}

json point_to_json(const Point& p) {
  if (const auto* s = std::get_if<ShiftPoint>(&p)) return {{"lo", s->lo}, {"symbols", s->sym}};
  if (const auto* t = std::get_if<ToyPoint>(&p)) return {{"index", t->index}};
  return {{"coords", reals(coordinates(std::get<TorusPoint>(p)))}};
}

std::vector<long long> n_range_from_json(const json& j) {
  std::vector<long long> out;
  if (j.is_object()) {
    const auto a = required<long long>(j, "from"), b = required<long long>(j, "to");
    const auto step = j.value("step", 1LL);
    if (step < 1) throw Error(ErrorKind::invalid_config, "n_range step must be >= 1");
    for (long long n = a; n <= b; n += step) out.push_back(n);
  } else if (j.is_array()) {
    out = j.get<std::vector<long long>>();
  } else {
    throw Error(ErrorKind::invalid_config, "n_range must be a list or {from, to}");
  }
  if (out.empty() || out.front() < 1 || !std::is_sorted(out.begin(), out.end()) ||
      std::adjacent_find(out.begin(), out.end()) != out.end())
    throw Error(ErrorKind::invalid_config, "n_range must be strictly increasing positive integers");
  return out;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_config, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_config, path.string() + ": " + e.what());
  }
}

json resolve_references(json config, const std::filesystem::path& base_dir) {
  for (const char* key : {"system", "potential"}) {
    if (!config.contains(key) || !config[key].is_string()) continue;
    const std::filesystem::path rel = config[key].get<std::string>();
    std::filesystem::path path = base_dir / rel;
    if (!std::filesystem::exists(path)) path = std::filesystem::path(CTLAB_DATA_DIR) / rel;
    if (!std::filesystem::exists(path))
      throw Error(ErrorKind::invalid_config, std::string(key) + " file not found: " + rel.string());
    config[key] = load_json_file(path);
  }
  return config;
}

json to_json(const Bracket& b) { return {{"lo", decimal(b.lo)}, {"hi", decimal(b.hi)}}; }

json to_json(const PressureEstimate& e) {
  json samples = json::array();
  for (const auto& s : e.samples) {
    json r{{"n", s.n},
           {"log_lower", decimal(s.log_lower)},
           {"log_upper", decimal(s.log_upper)},
           {"empty", s.empty},
           {"members_lower", s.members_lower},
           {"members_upper", s.members_upper}};
    if (s.log_lower_2delta) r["log_lower_2delta"] = decimal(*s.log_lower_2delta);
    samples.push_back(std::move(r));
  }
  json out{{"delta", decimal(e.delta)},
           {"eps", decimal(e.eps)},
           {"bracket", to_json(e.bracket())},
           {"fit_lower", decimal(e.fit_lower)},
           {"fit_upper", decimal(e.fit_upper)},
           {"drift", decimal(e.drift)},
           {"fit_min", e.fit_min},
           {"fit_max", e.fit_max},
           {"grid", e.grid},
           {"samples", std::move(samples)}};
  if (e.monotone_in_delta) out["monotone_in_delta"] = *e.monotone_in_delta;
  return out;
}

json to_json(const EntropyGapReport& r) {
  return {{"h_top", to_json(r.h_top)},     {"h_u", to_json(r.h_u)},
          {"h_s", to_json(r.h_s)},         {"sup_phi", decimal(r.sup_phi)},
          {"inf_phi", decimal(r.inf_phi)}, {"margin", decimal(r.margin)},
          {"margin_bracket", to_json(r.margin_bracket)}, {"holds", r.holds},
          {"grid", r.grid}};
}

json to_json(const BowenReport& r) {
  json recs = json::array();
  for (const auto& d : r.records)
    recs.push_back({{"n", d.n}, {"distortion", decimal(d.distortion)}, {"samples", d.samples}});
  return {{"empirical_sup", decimal(r.empirical_sup)},
          {"K", decimal(r.theory.K)},
          {"K_terms", r.theory.terms},
          {"K_tail_bound", decimal(r.theory.tail_bound)},
          {"holds", r.holds},
          {"segments", r.segments},
          {"skipped_not_in_G", r.skipped_not_in_G},
          {"samples", r.samples},
          {"records", std::move(recs)}};
}

json to_json(const SpecificationResult& r) {
  return {{"ok", r.ok},
          {"y", point_to_json(r.y)},
          {"gaps", r.gaps},
          {"starts", r.starts},
          {"distances", reals(r.distances)},
          {"predicted_gap", r.predicted_gap},
          {"note", r.note}};
}

json to_json(const ExpansivityReport& r) {
  json seeds = json::array();
  for (const auto& s : r.seeds)
    seeds.push_back({{"seed", point_to_json(s.seed)},
                     {"diameters", reals(s.diameters)},
                     {"late_ratio", decimal(s.late_ratio)},
                     {"flagged", s.flagged}});
  json out{{"empty", r.empty}, {"seeds", std::move(seeds)}, {"note", r.note}};
  if (r.pressure) out["pressure"] = to_json(*r.pressure);
  return out;
}

json to_json(const MinimalityReport& r) {
  json seeds = json::array();
  for (const auto& s : r.seeds)
    seeds.push_back({{"seed", point_to_json(s.seed)},
                     {"worst_gap", decimal(s.worst_gap)},
                     {"worst_target", reals(s.worst_target)},
                     {"samples", s.samples}});
  return {{"R", decimal(r.R)},       {"eps", decimal(r.eps)},       {"dense", r.dense},
          {"worst_gap", decimal(r.worst_gap)}, {"targets", r.targets}, {"seeds", std::move(seeds)}};
}

json to_json(const RadiusSearch& r) {
  json trace = json::array();
  for (const auto& s : r.trace) trace.push_back({{"R", decimal(s.R)}, {"worst_gap", decimal(s.worst_gap)}, {"dense", s.dense}});
  json out{{"found", r.R0.has_value()}, {"trace", std::move(trace)}};
  if (r.R0) out["R0"] = decimal(*r.R0);
  return out;
}

json to_json(const CTReport& r) {
  json out{{"delta", decimal(r.delta)},
           {"eps", decimal(r.eps)},
           {"r", decimal(r.r)},
           {"a_param", decimal(r.a_param)},
           {"scale_ok", r.scale_ok},
           {"bad_empty", r.bad_empty},
           {"trivial_decomposition", r.trivial_decomposition},
           {"spec_success_rate", decimal(r.spec_success_rate)},
           {"spec_max_gap", r.spec_max_gap},
           {"spec_predicted_gap", r.spec_predicted_gap},
           {"verdicts",
            {{"bad_pressure", to_string(r.bad_pressure_verdict())},
             {"bowen", to_string(r.bowen_verdict())},
             {"specification", to_string(r.specification_verdict())},
             {"expansivity", to_string(r.expansivity_verdict())}}},
           {"all_pass", r.all_pass()},
           {"notes", r.notes}};
  if (r.pressure_all) out["pressure_all"] = to_json(*r.pressure_all);
  if (r.pressure_bad) out["pressure_bad"] = to_json(*r.pressure_bad);
  if (r.bowen) out["bowen"] = to_json(*r.bowen);
  if (r.expansivity) out["expansivity"] = to_json(*r.expansivity);
  return out;
}

std::string seal_record(json record) {
  record.erase("checksum");
  const std::string body = record.dump();
  record["checksum"] = hex64(fnv1a(body));
  return record.dump();
}

bool verify_record_line(const std::string& line) {
  try {
    json j = json::parse(line);
    if (!j.is_object() || !j.contains("checksum") || !j["checksum"].is_string()) return false;
    const auto sum = j["checksum"].get<std::string>();
    j.erase("checksum");
    return hex64(fnv1a(j.dump())) == sum;
  } catch (const json::exception&) {
    return false;
  }
}

}  // namespace ctlab
