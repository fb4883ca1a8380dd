#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "sfpca/cli.hpp"
#include "sfpca/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Closed-form PCA in spherical and hyperbolic space forms"};
  app.set_version_flag("--version", std::string(sfpca::kVersion));
  app.require_subcommand(1);

  // bench
  sfpca::cli::BenchOptions bench;
  std::uint64_t seed_override = 0;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Run a config-driven experiment grid");
  bench_cmd->add_option("--config", bench.config_path, "JSON config file")
      ->required();
  bench_cmd->add_option("--out", bench.output_dir_override,
                        "Output directory (overrides config)");
  bench_cmd->add_option("--threads", bench.threads_override,
                        "Parallel trial workers (overrides config)");
  CLI::Option* seed_opt = bench_cmd->add_option(
      "--seed", seed_override, "RNG seed (overrides config)");

  // fit
  sfpca::cli::FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit one model to a points file");
  fit_cmd->add_option("points", fit.points_path, "Points CSV (header x0..xD)")
      ->required();
  fit_cmd->add_option("--space", fit.space, "spherical or hyperbolic")
      ->required()
      ->check(CLI::IsMember({"spherical", "hyperbolic"}));
  fit_cmd->add_option("--curvature", fit.curvature, "Curvature C")->required();
  fit_cmd->add_option("--k", fit.k, "Subspace dimension")->required();
  fit_cmd->add_option("--method", fit.method, "sfpca or pga")
      ->check(CLI::IsMember({"sfpca", "pga"}));
  fit_cmd->add_option("--out", fit.out_path, "Model JSON output")->required();
  fit_cmd->add_option("--projections", fit.projections_path,
                      "Write projected points CSV");
  fit_cmd->add_option("--low-dim", fit.low_dim_path,
                      "Write low-dimensional coordinates CSV");

  // spectrum
  sfpca::cli::SpectrumOptions spectrum;
  CLI::App* spectrum_cmd = app.add_subcommand(
      "spectrum", "Retained-energy curves and knee-point ranking");
  spectrum_cmd
      ->add_option("points", spectrum.points_paths,
                   "Hyperbolic points CSV files")
      ->required();
  spectrum_cmd->add_option("--curvature", spectrum.curvature,
                           "Curvature C (negative)");
  spectrum_cmd->add_option("--out", spectrum.out_dir, "Output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sfpca::cli::kExitConfigError;
  }

  if (bench_cmd->parsed()) {
    bench.seed_overridden = seed_opt->count() > 0;
    bench.seed_override = seed_override;
    return sfpca::cli::cmd_bench(bench);
  }
  if (fit_cmd->parsed()) return sfpca::cli::cmd_fit(fit);
  return sfpca::cli::cmd_spectrum(spectrum);
}
