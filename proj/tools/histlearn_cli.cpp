// Batch front-end: histlearn <run|ablate|heatmap|verify> --config <path> --out <dir>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "histlearn/experiment.hpp"

namespace {

struct Invocation {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", inv.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", inv.seed, "Override master_seed");
  cmd->add_option("--threads", inv.threads, "Worker threads (output does not depend on it)");
}

int execute(const Invocation& inv, std::optional<histlearn::Mode> forced) {
  std::ifstream in(inv.config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto config = histlearn::parse_config(buf.str());
  if (forced) config.mode = *forced;
  if (inv.seed) config.master_seed = *inv.seed;
  if (inv.threads) config.threads = std::max<std::size_t>(1, *inv.threads);

  std::cerr << "histlearn " << histlearn::to_string(config.mode) << " on "
            << histlearn::instance_id(config.instance) << " (config "
            << histlearn::config_hash(config) << ")\n";
  const auto report = histlearn::run_mode(config, inv.out_dir, std::cout);
  return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"History-restricted online learning experiments"};
  app.require_subcommand(1);

  Invocation inv;
  struct Entry {
    const char* name;
    const char* help;
    std::optional<histlearn::Mode> mode;
  };
  const Entry entries[] = {
      {"run", "Execute the mode named in the config (default: regret traces)", std::nullopt},
      {"ablate", "Average final regret over the M grid", histlearn::Mode::Ablate},
      {"heatmap", "Cumulative regret over (M, t) per learner", histlearn::Mode::Heatmap},
      {"verify", "Property checks for the configured instance", histlearn::Mode::Verify},
  };
  std::optional<histlearn::Mode> chosen;
  for (const auto& e : entries) {
    auto* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, inv);
    cmd->callback([&chosen, mode = e.mode] { chosen = mode; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return execute(inv, chosen);
  } catch (const histlearn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
