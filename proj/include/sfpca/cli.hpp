#pragma once

#include <json.hpp>

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sfpca/bench.hpp"
#include "sfpca/errors.hpp"
#include "sfpca/io.hpp"
#include "sfpca/pca.hpp"
#include "sfpca/pga.hpp"
#include "sfpca/space_form.hpp"
#include "sfpca/spectrum.hpp"
#include "sfpca/version.hpp"

namespace sfpca::cli {

// Exit-code contract shared by all subcommands: 0 full success, 1 on config
// or input errors, 2 when individual trials or datasets failed but the run
// completed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

namespace detail {

inline std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw ConfigError(std::string("config: missing field '") + name + "'");
  return *it;
}

inline std::vector<int> int_list(const nlohmann::json& v, const char* name) {
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw ConfigError(std::string("config: field '") + name +
                          "' must contain integers");
      out.push_back(e.get<int>());
    }
  } else {
    throw ConfigError(std::string("config: field '") + name +
                      "' must be an integer or list of integers");
  }
  if (out.empty())
    throw ConfigError(std::string("config: field '") + name + "' is empty");
  return out;
}

inline std::vector<double> double_list(const nlohmann::json& v,
                                       const char* name) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number())
        throw ConfigError(std::string("config: field '") + name +
                          "' must contain numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(std::string("config: field '") + name +
                      "' must be a number or list of numbers");
  }
  if (out.empty())
    throw ConfigError(std::string("config: field '") + name + "' is empty");
  return out;
}

inline Geometry parse_geometry(const std::string& s) {
  if (s == "spherical") return Geometry::Spherical;
  if (s == "hyperbolic") return Geometry::Hyperbolic;
  throw ConfigError("space must be 'spherical' or 'hyperbolic', got '" + s +
                    "'");
}

inline nlohmann::json parse_json_text(const std::string& text,
                                      const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Convert the byte offset into a line number for the diagnostic.
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError(origin + ": line " + std::to_string(line) + ": " +
                      e.what());
  }
}

}  // namespace detail

struct ParsedBenchConfig {
  ExperimentConfig experiment;
  std::string output_dir;
  std::string canonical_json;  // sorted-key compact echo, used for hashing
  size_t skipped_cells = 0;
};

/// Parses and validates the bench config document. Lists for D/K/N/sigma
/// produce the Cartesian grid; scalars are one-element lists.
inline ParsedBenchConfig parse_bench_config(const std::string& text,
                                            const std::string& origin) {
  const nlohmann::json j = detail::parse_json_text(text, origin);
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");

  ParsedBenchConfig parsed;
  ExperimentConfig& cfg = parsed.experiment;

  cfg.name = j.value("experiment", std::string("experiment"));
  cfg.kind = detail::parse_geometry(
      detail::require_field(j, "space").get<std::string>());
  cfg.curvature = detail::require_field(j, "curvature").get<double>();
  if (cfg.kind == Geometry::Spherical && !(cfg.curvature > 0.0))
    throw ConfigError("config: spherical curvature must be positive");
  if (cfg.kind == Geometry::Hyperbolic && !(cfg.curvature < 0.0))
    throw ConfigError("config: hyperbolic curvature must be negative");

  cfg.ambient_dims = detail::int_list(detail::require_field(j, "D"), "D");
  cfg.subspace_dims = detail::int_list(detail::require_field(j, "K"), "K");
  cfg.point_counts = detail::int_list(detail::require_field(j, "N"), "N");
  cfg.noise_levels =
      detail::double_list(detail::require_field(j, "sigma"), "sigma");
  for (int d : cfg.ambient_dims)
    if (d < 2) throw ConfigError("config: D must be >= 2");
  for (int k : cfg.subspace_dims)
    if (k < 1) throw ConfigError("config: K must be >= 1");
  for (int n : cfg.point_counts)
    if (n < 1) throw ConfigError("config: N must be >= 1");
  for (double s : cfg.noise_levels)
    if (s < 0.0) throw ConfigError("config: sigma must be >= 0");

  cfg.trials = detail::require_field(j, "trials").get<int>();
  if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
  cfg.seed = detail::require_field(j, "seed").get<std::uint64_t>();

  cfg.methods.clear();
  for (const auto& m : detail::require_field(j, "methods")) {
    const std::string name = m.get<std::string>();
    if (name != "sfpca" && name != "pga")
      throw ConfigError("config: unknown method '" + name + "'");
    cfg.methods.push_back(name);
  }
  if (cfg.methods.empty()) throw ConfigError("config: methods is empty");

  cfg.threads = j.value("threads", 1);
  if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
  parsed.output_dir = j.value("output_dir", std::string());

  size_t all_cells = cfg.ambient_dims.size() * cfg.subspace_dims.size() *
                     cfg.point_counts.size() * cfg.noise_levels.size();
  parsed.skipped_cells = all_cells - sfpca::detail::expand_grid(cfg).size();
  parsed.canonical_json = j.dump();
  return parsed;
}

inline std::string reports_to_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "experiment,method,D,K,N,sigma,trial,n_i,n_o,ratio,fit_seconds,"
         "converged\n";
  for (const TrialReport& r : reports) {
    out << r.experiment << ',' << r.method << ',' << r.ambient_dim << ','
        << r.subspace_dim << ',' << r.n_points << ',' << fmt17(r.sigma) << ','
        << r.trial << ',' << fmt17(r.n_i) << ',' << fmt17(r.n_o) << ','
        << fmt17(r.ratio) << ',' << fmt17(r.fit_seconds) << ','
        << (r.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

struct BenchOptions {
  std::string config_path;
  std::string output_dir_override;
  int threads_override = 0;            // 0: use config value
  bool seed_overridden = false;
  std::uint64_t seed_override = 0;
};

/// `bench`: run a config-driven experiment grid and write results.csv plus a
/// manifest.json sidecar into the output directory.
inline int cmd_bench(const BenchOptions& opts) {
  std::string started = detail::iso_utc_now();
  ParsedBenchConfig parsed;
  std::string output_dir;
  try {
    const std::string text = read_text_file(opts.config_path);
    parsed = parse_bench_config(text, opts.config_path);
    if (opts.threads_override > 0)
      parsed.experiment.threads = opts.threads_override;
    if (opts.seed_overridden) parsed.experiment.seed = opts.seed_override;
    output_dir = opts.output_dir_override.empty() ? parsed.output_dir
                                                  : opts.output_dir_override;
    if (output_dir.empty())
      throw ConfigError("config: missing 'output_dir' (or pass --out)");
    std::filesystem::create_directories(output_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::vector<TrialReport> reports;
  try {
    reports = run_grid(parsed.experiment);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  size_t failures = 0;
  for (const TrialReport& r : reports)
    if (!r.error.empty()) ++failures;

  const std::string csv_path =
      (std::filesystem::path(output_dir) / "results.csv").string();
  const std::string manifest_path =
      (std::filesystem::path(output_dir) / "manifest.json").string();
  try {
    write_text_file(csv_path, reports_to_csv(reports));
    std::ostringstream manifest;
    manifest << "{\n"
             << "  \"tool\": \"sfpca\",\n"
             << "  \"version\": \"" << kVersion << "\",\n"
             << "  \"config_hash\": \"fnv1a64:"
             << to_hex(fnv1a64(parsed.canonical_json)) << "\",\n"
             << "  \"seed\": " << parsed.experiment.seed << ",\n"
             << "  \"rng\": \"" << SplitMix64::kName << "\",\n"
             << "  \"started_utc\": \"" << started << "\",\n"
             << "  \"finished_utc\": \"" << detail::iso_utc_now() << "\",\n"
             << "  \"outputs\": [\"" << json_escape(csv_path) << "\"],\n"
             << "  \"trial_errors\": " << failures << ",\n"
             << "  \"skipped_cells\": " << parsed.skipped_cells << ",\n"
             << "  \"config\": " << parsed.canonical_json << "\n"
             << "}\n";
    write_text_file(manifest_path, manifest.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (failures > 0) {
    std::cerr << "warning: " << failures << " trial fits failed; see "
              << csv_path << '\n';
    return kExitPartialFailure;
  }
  return kExitOk;
}

namespace detail {

inline void validate_points(const SpaceForm& space, const Matrix& points,
                            const std::string& origin) {
  if (points.rows() != space.coord_size())
    throw InvalidPoint(origin + ": expected " +
                       std::to_string(space.coord_size()) +
                       " columns for D = " +
                       std::to_string(space.ambient_dim()) + ", got " +
                       std::to_string(points.rows()));
  for (Index i = 0; i < points.cols(); ++i) {
    if (!space.is_point(points.col(i))) {
      std::ostringstream msg;
      msg << origin << ": row " << (i + 1) << " (line " << (i + 2)
          << "): invalid " << to_string(space.kind())
          << " point, norm residual " << space.point_residual(points.col(i));
      if (!space.spherical() && !(points(0, i) > 0.0))
        msg << ", x0 must be positive";
      throw InvalidPoint(msg.str());
    }
  }
}

inline std::string model_to_json(const PcaModel& model, int k, double fit_cost,
                                 Index n_points) {
  std::ostringstream out;
  out << "{\n"
      << "  \"tool\": \"sfpca\",\n"
      << "  \"version\": \"" << kVersion << "\",\n"
      << "  \"method\": \"" << model.method << "\",\n"
      << "  \"space\": {\"kind\": \"" << to_string(model.space.kind())
      << "\", \"curvature\": " << fmt17(model.space.curvature())
      << ", \"ambient_dim\": " << model.space.ambient_dim() << "},\n"
      << "  \"k\": " << k << ",\n"
      << "  \"cost\": " << fmt17(fit_cost) << ",\n"
      << "  \"n_points\": " << n_points << ",\n";
  out << "  \"base\": [";
  for (Index i = 0; i < model.base.size(); ++i) {
    if (i) out << ", ";
    out << fmt17(model.base[i]);
  }
  out << "],\n";
  // Only the K requested components: the K-dimensional model is the
  // deliverable, and K = 0 leaves just the mean.
  out << "  \"components\": [";
  for (int c = 0; c < k; ++c) {
    if (c) out << ", ";
    out << '[';
    for (Index i = 0; i < model.components.rows(); ++i) {
      if (i) out << ", ";
      out << fmt17(model.components(i, c));
    }
    out << ']';
  }
  out << "],\n";
  out << "  \"base_eigenvalue\": " << fmt17(model.base_eigenvalue) << ",\n";
  out << "  \"component_eigenvalues\": [";
  for (Index i = 0; i < model.component_eigenvalues.size(); ++i) {
    if (i) out << ", ";
    out << fmt17(model.component_eigenvalues[i]);
  }
  out << "],\n";
  out << "  \"flags\": {\"degenerate\": "
      << (model.degenerate ? "true" : "false")
      << ", \"regularized\": " << (model.regularized ? "true" : "false")
      << ", \"converged\": " << (model.converged ? "true" : "false")
      << "}\n";
  out << "}\n";
  return out.str();
}

}  // namespace detail

struct FitOptions {
  std::string points_path;
  std::string space;  // "spherical" or "hyperbolic"
  double curvature = 0.0;
  int k = 0;
  std::string method = "sfpca";
  std::string out_path;
  std::string projections_path;  // optional
  std::string low_dim_path;      // optional
};

/// `fit`: fit one model to a points file and write it as JSON. Optionally
/// emits the projected points and their low-dimensional coordinates.
inline int cmd_fit(const FitOptions& opts) {
  try {
    const Geometry kind = detail::parse_geometry(opts.space);
    const Matrix points = read_points_csv(opts.points_path);
    const int ambient_dim = static_cast<int>(points.rows()) - 1;
    if (ambient_dim < 2)
      throw ConfigError(opts.points_path + ": needs at least 3 columns (D >= 2)");
    const SpaceForm space(kind, opts.curvature, ambient_dim);
    detail::validate_points(space, points, opts.points_path);
    if (opts.k < 0 || opts.k > ambient_dim)
      throw ConfigError("--k must be between 0 and D = " +
                        std::to_string(ambient_dim));

    PcaModel model{space, "", Vector(), Matrix(), 0.0, Vector()};
    if (opts.method == "sfpca") {
      model = fit(space, points);
    } else if (opts.method == "pga") {
      model = fit_pga(space, points);
    } else {
      throw ConfigError("unknown method '" + opts.method + "'");
    }
    const double fit_cost = cost(model, opts.k, points);

    if (opts.out_path.empty()) throw ConfigError("missing --out path");
    write_text_file(opts.out_path,
                    detail::model_to_json(model, opts.k, fit_cost,
                                          points.cols()));

    if (!opts.projections_path.empty() || !opts.low_dim_path.empty()) {
      const AffineSubspace sub = model.subspace(opts.k);
      if (!opts.projections_path.empty()) {
        Matrix projected(points.rows(), points.cols());
        for (Index i = 0; i < points.cols(); ++i)
          projected.col(i) = model.denoise(points.col(i), opts.k);
        write_points_csv(opts.projections_path, projected);
      }
      if (!opts.low_dim_path.empty()) {
        Matrix low(opts.k + 1, points.cols());
        for (Index i = 0; i < points.cols(); ++i)
          low.col(i) = sub.to_low_dim(model.denoise(points.col(i), opts.k));
        std::ostringstream out;
        for (Index i = 0; i <= opts.k; ++i)
          out << (i ? "," : "") << 'y' << i;
        out << '\n';
        for (Index c = 0; c < low.cols(); ++c) {
          for (Index r = 0; r < low.rows(); ++r)
            out << (r ? "," : "") << fmt17(low(r, c));
          out << '\n';
        }
        write_text_file(opts.low_dim_path, out.str());
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

struct SpectrumOptions {
  std::vector<std::string> points_paths;
  double curvature = -1.0;
  std::string out_dir;
};

/// `spectrum`: retained-energy curves and a knee-point ranking for one or
/// more hyperbolic point files. Datasets whose fit fails are ranked last.
inline int cmd_spectrum(const SpectrumOptions& opts) {
  std::vector<Matrix> datasets;
  SpaceForm space = SpaceForm::hyperbolic(-1.0, 2);
  try {
    if (opts.points_paths.empty())
      throw ConfigError("spectrum: no input point files");
    if (!(opts.curvature < 0.0))
      throw ConfigError("spectrum: curvature must be negative");
    if (opts.out_dir.empty()) throw ConfigError("spectrum: missing --out dir");
    std::filesystem::create_directories(opts.out_dir);

    int ambient_dim = -1;
    for (const std::string& path : opts.points_paths) {
      Matrix points = read_points_csv(path);
      if (ambient_dim < 0) {
        ambient_dim = static_cast<int>(points.rows()) - 1;
        if (ambient_dim < 2)
          throw ConfigError(path + ": needs at least 3 columns (D >= 2)");
        space = SpaceForm::hyperbolic(opts.curvature, ambient_dim);
      } else if (points.rows() != ambient_dim + 1) {
        throw ConfigError(path + ": dimension differs from the first dataset");
      }
      detail::validate_points(space, points, path);
      datasets.push_back(std::move(points));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  size_t failures = 0;
  try {
    // Per-dataset curves; fit failures surface in the ranking only.
    for (size_t i = 0; i < datasets.size(); ++i) {
      try {
        const PcaModel model = fit_hyperbolic(space, datasets[i]);
        const SpectrumCurve curve = spectrum_curve(model);
        std::ostringstream out;
        out << "x,retained\n";
        for (Index r = 0; r < curve.normalized_dims.size(); ++r)
          out << fmt17(curve.normalized_dims[r]) << ','
              << fmt17(curve.retained[r]) << '\n';
        const std::string stem =
            std::filesystem::path(opts.points_paths[i]).stem().string();
        write_text_file((std::filesystem::path(opts.out_dir) /
                         ("curve_" + std::to_string(i) + "_" + stem + ".csv"))
                            .string(),
                        out.str());
      } catch (const Error&) {
        // recorded by rank_datasets below
      }
    }

    const std::vector<RankedDataset> ranked = rank_datasets(space, datasets);
    std::ostringstream out;
    out << "dataset_id,knee_x,rank\n";
    for (size_t r = 0; r < ranked.size(); ++r) {
      const RankedDataset& entry = ranked[r];
      if (entry.failed) ++failures;
      out << opts.points_paths[static_cast<size_t>(entry.index)] << ','
          << (entry.failed ? "nan" : fmt17(entry.knee_x)) << ',' << (r + 1)
          << '\n';
    }
    write_text_file(
        (std::filesystem::path(opts.out_dir) / "ranking.csv").string(),
        out.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (failures > 0) {
    std::cerr << "warning: " << failures << " dataset fits failed\n";
    return kExitPartialFailure;
  }
  return kExitOk;
}

}  // namespace sfpca::cli
