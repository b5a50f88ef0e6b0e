#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "latnc/harness.hpp"

namespace {

const std::vector<std::string> kPresets = {"fig10_11_ldlc", "fig12_qpsk",
                                           "fig14_16qam"};

int default_threads() {
  if (const char* env = std::getenv("LATNC_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice / BICM network-coding link simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv";
  int threads = default_threads();
  std::int64_t seed = -1;

  CLI::App* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_path, "Output file (default: stdout)");
  run->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "Worker threads");
  run->add_option("--seed", seed, "Override the config seed");

  CLI::App* presets = app.add_subcommand("presets", "Preset management");
  CLI::App* presets_list = presets->add_subcommand("list", "List shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (presets_list->parsed()) {
    for (const auto& name : kPresets) std::cout << name << "\n";
    return 0;
  }

  latnc::ExperimentConfig config;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    config = latnc::parse_config(buf.str());
  } catch (const latnc::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (threads < 1) {
    std::cerr << "config error: --threads must be >= 1\n";
    return 2;
  }

  try {
    const auto rows = latnc::run_experiment(config, threads);
    if (out_path.empty()) {
      std::cout << (format == "csv" ? latnc::results_to_csv(rows)
                                    : latnc::results_to_json(rows));
    } else {
      latnc::write_results(rows, out_path, format);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
