#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "ctlab/criterion.hpp"
#include "ctlab/foliation.hpp"
#include "ctlab/hyperbolicity.hpp"

namespace ctlab {

using json = nlohmann::json;

/// Floats travel as decimal strings ("%.17g"); numbers are accepted on input.
std::string decimal(double x);
double read_real(const json& j, const std::string& key);
double read_real(const json& j, const std::string& key, double fallback);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t h);

SystemModel system_from_json(const json& j);
Potential potential_from_json(const json& j);
Point point_from_json(const SystemModel& system, const json& j);
json point_to_json(const Point& p);
std::vector<long long> n_range_from_json(const json& j);

/// Resolves "system" / "potential" entries that are file paths: relative to
/// the config directory first, then to the shipped data directory.
json load_json_file(const std::filesystem::path& path);
json resolve_references(json config, const std::filesystem::path& base_dir);

json to_json(const PressureEstimate& e);
json to_json(const Bracket& b);
json to_json(const EntropyGapReport& r);
json to_json(const BowenReport& r);
json to_json(const SpecificationResult& r);
json to_json(const ExpansivityReport& r);
json to_json(const MinimalityReport& r);
json to_json(const RadiusSearch& r);
json to_json(const CTReport& r);

/// Appends `"checksum"` (FNV-1a of the record dumped without it).
std::string seal_record(json record);
/// True when a JSONL line parses and its checksum matches.
bool verify_record_line(const std::string& line);

}  // namespace ctlab
