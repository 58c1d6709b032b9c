#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctlab/io.hpp"

namespace ctlab {

inline constexpr const char* kToolVersion = "0.1.0";

const std::vector<std::string>& subcommands();

struct RunOptions {
  int workers = 0;                      // 0: take "workers" from the config, else 1
  std::optional<std::uint64_t> seed;    // overrides the config seed
  std::optional<std::filesystem::path> out;  // overrides the config "out"
  std::filesystem::path base_dir = ".";      // for relative system/potential paths
  std::string timestamp;                // empty: current UTC time
};

struct RunResult {
  int exit_code = 0;
  json payload;
  std::string config_hash;
  std::string table;   // human-readable, 6 significant digits
  std::string record;  // the sealed JSONL line; empty when nothing was written
  std::string error;
};

/// Canonical config: references resolved, seed applied, "workers" and "out"
/// removed. The config hash is FNV-1a of its compact dump.
json canonical_config(const json& config, const RunOptions& options);

/// Pure part of a run: the payload depends only on the canonical config.
json run_payload(const std::string& subcommand, const json& canonical, int workers);

/// Full run: validates, executes, appends one record to the results file and
/// renders the table. Exit 2 on invalid config (nothing written), 1 when a
/// ct-report hypothesis fails, 0 otherwise.
RunResult run(const std::string& subcommand, const json& config, const RunOptions& options = {});

std::string render_table(const std::string& subcommand, const json& payload);

}  // namespace ctlab
