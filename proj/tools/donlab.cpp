// donlab: command-line front end for the DeepONet laboratory shared library.
// Subcommands map onto the library's JSON-driven tools; every run writes its
// outputs (CSV/JSONL + manifest.json) under --out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "deeponet/deeponet.h"
#include "json.hpp"

namespace {

using nlohmann::json;

int run(const json& cfg, const std::string& out_dir, int threads) {
  char* manifest = nullptr;
  don_status st = don_run_tool(cfg.dump().c_str(), out_dir.c_str(), threads, &manifest);
  if (st == DON_OK) {
    if (manifest) {
      json m = json::parse(manifest);
      std::cout << "wrote " << out_dir << " (";
      bool first = true;
      for (const auto& f : m["files"]) {
        std::cout << (first ? "" : ", ") << f.get<std::string>();
        first = false;
      }
      std::cout << ")\n";
      don_string_free(manifest);
    }
    return 0;
  }
  std::cerr << "error: " << don_last_error() << "\n";
  return st == DON_ERR_INVALID_ARG ? 2 : 1;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DeepONet laboratory (operator networks, error decompositions, PDE oracles)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  app.add_option("--config", config_path, "JSON config file (merged under the subcommand)");
  app.add_option("--seed", seed, "master seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for sweeps");

  struct Sub {
    CLI::App* cmd;
    const char* tool;
  };
  std::vector<Sub> subs = {
      {app.add_subcommand("sample", "draw samples from a measure"), "sample"},
      {app.add_subcommand("oracle", "dump (input, output) pairs of a ground-truth operator"),
       "oracle"},
      {app.add_subcommand("encdec-error", "Monte-Carlo encoding error sweep (CSV)"),
       "encdec-error"},
      {app.add_subcommand("spectrum", "empirical covariance spectrum (CSV)"), "spectrum"},
      {app.add_subcommand("train", "train a DeepONet and write a checkpoint"), "train"},
      {app.add_subcommand("evaluate", "evaluate a checkpoint against its operator"), "evaluate"},
      {app.add_subcommand("emulate", "finite-difference emulation check"), "emulate"},
      {app.add_subcommand("experiment", "config-driven experiment sweep"), "experiment"},
  };
  for (auto& s : subs) s.cmd->fallthrough();  // global flags may follow the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are config errors
  }

  try {
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    for (const auto& s : subs) {
      if (app.got_subcommand(s.cmd)) {
        cfg["tool"] = s.tool;
        break;
      }
    }
    if (seed_set || !cfg.contains("seed")) cfg["seed"] = seed;
    return run(cfg, out_dir, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
