#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace opgrowth;
  CLI::App app{"opgrowth: Lanczos coefficients, Krylov complexity and structure functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OPGROWTH_VERSION);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> precision;
  int jobs = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"model", "build a model; write spectrum.csv and operator.csv"},
      {"lanczos", "Lanczos coefficients and growth report"},
      {"dynamics", "Krylov complexity and autocorrelation on a time grid"},
      {"structure", "binned structure function and decay-class fit"},
      {"sweep", "growth reports over a grid of beta, gamma, p or chain length"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides config.output)");
    sub->add_option("--seed", seed, "random seed (overrides config.seed)");
    sub->add_option("--jobs", jobs, "worker threads for seed averages and sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--precision", precision, "Lanczos arithmetic")->check(CLI::IsMember({"double", "extended"}));
  }
  CLI11_PARSE(app, argc, argv);

  try {
    cli::RunConfig cfg = cli::load_config(config_path);
    if (out_dir) cfg.output = *out_dir;
    if (seed) cfg.seed = *seed;
    if (precision) cfg.lanczos.options.precision = parse_precision(*precision);
    const std::string command = app.get_subcommands().front()->get_name();
    cli::run_command(command, cfg, jobs);
    std::cout << "wrote " << cfg.output.string() << "/manifest.json\n";
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::invalid_config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
