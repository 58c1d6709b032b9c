#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "ctlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ctlab: pressure, decomposition and criterion experiments on model systems"};
  std::string sub, config_path, out;
  int workers = 0;
  std::uint64_t seed = 0;
  app.add_option("subcommand", sub, "experiment to run")->required()->check(CLI::IsMember(ctlab::subcommands()));
  app.add_option("--config", config_path, "JSON config")->required();
  app.add_option("--out", out, "JSONL results file (appended)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ctlab::RunOptions opt;
  opt.workers = workers;
  if (*seed_opt) opt.seed = seed;
  if (!out.empty()) opt.out = out;
  ctlab::json config;
  try {
    config = ctlab::load_json_file(config_path);
    opt.base_dir = std::filesystem::path(config_path).parent_path();
  } catch (const ctlab::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  try {
    const auto res = ctlab::run(sub, config, opt);
    if (!res.error.empty()) std::cerr << res.error << '\n';
    std::cout << res.table;
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
