// Command-line front end: simulate seasonal panels, fit them, and run the
// Monte Carlo verification studies. Every command is a pure function of
// (config file, seed): identical inputs produce identical output bytes.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flexseas/asymptotics.hpp"
#include "flexseas/csv.hpp"
#include "flexseas/errors.hpp"
#include "flexseas/estimator.hpp"
#include "flexseas/serialize.hpp"
#include "flexseas/version.hpp"
#include "flexseas/weakdep.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 = machine parallelism
  bool quiet = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory (default: .)");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--threads", opts.threads,
                  "worker cap for replications (0 = all cores)");
  auto* quiet = cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
  cmd->add_flag("--verbose", opts.verbose, "extra progress output")
      ->excludes(quiet);
}

void say(const CommonOpts& opts, const std::string& line) {
  if (!opts.quiet) std::cout << line << "\n";
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  return (fs::path(opts.out_dir) / name).string();
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Sidecar carrying the resolved config, its hash, and the produced files;
// the pinned CSV layouts stay clean of annotations.
void write_metadata(const CommonOpts& opts, const std::string& command,
                    const std::string& config_text,
                    const std::vector<std::string>& outputs,
                    std::optional<std::uint64_t> resolved_seed,
                    const std::string& meta_name) {
  json meta;
  meta["command"] = command;
  meta["version"] = flexseas::kVersion;
  meta["config_hash"] = hash_hex(flexseas::canonical_json_hash(config_text));
  meta["config"] = json::parse(config_text);
  if (resolved_seed) meta["seed"] = *resolved_seed;
  json files = json::array();
  for (const auto& f : outputs) files.push_back(fs::path(f).filename().string());
  meta["outputs"] = std::move(files);
  flexseas::write_text_file(out_path(opts, meta_name), meta.dump(2) + "\n");
}

int cmd_simulate(const CommonOpts& opts) {
  const std::string config_text = flexseas::read_text_file(opts.config_path);
  flexseas::SimulateRequest req = flexseas::parse_simulate_config(config_text);
  const std::uint64_t seed = opts.seed.value_or(req.seed);
  Eigen::MatrixXd errors;
  if (req.error) {
    errors = flexseas::simulate(*req.error, req.n, seed);
  } else {
    errors = Eigen::MatrixXd::Zero(req.n, req.curves.d());
  }
  const flexseas::SeasonalPanel panel =
      flexseas::synthesize_panel(req.curves, errors);
  const std::string csv_path = out_path(opts, "panel.csv");
  flexseas::write_text_file(csv_path, flexseas::panel_to_csv(panel));
  write_metadata(opts, "simulate", config_text, {csv_path}, seed,
                 "panel.meta.json");
  say(opts, "wrote " + csv_path + " (n=" + std::to_string(panel.n()) +
                ", d=" + std::to_string(panel.d()) + ", curves=" +
                req.curves_echo + ", error=" + req.error_echo + ")");
  return 0;
}

int cmd_fit(const CommonOpts& opts) {
  const std::string config_text = flexseas::read_text_file(opts.config_path);
  const flexseas::FitRequest req = flexseas::parse_fit_config(config_text);
  const flexseas::SeasonalPanel panel =
      flexseas::panel_from_csv(flexseas::read_text_file(req.input));
  const int d = panel.d();

  // Degenerate grid points do not abort the run: their estimate fields stay
  // empty and a warnings file names them.
  std::string out = "t";
  for (int j = 0; j <= d; ++j) {
    out += (j == 0) ? ",alpha_hat" : ",beta_" + std::to_string(j) + "_hat";
  }
  for (int j = 0; j <= d; ++j) {
    out += (j == 0) ? ",alpha_prime_hat"
                    : ",beta_" + std::to_string(j) + "_prime_hat";
  }
  out += '\n';
  std::string warnings;
  int failed = 0;
  for (int g = 0; g < req.grid_points; ++g) {
    const double t = static_cast<double>(g) / (req.grid_points - 1);
    out += flexseas::format_double(t);
    try {
      const flexseas::FitResult fit = flexseas::fit_at(panel, req.fit, t);
      for (const auto* vec : {&fit.theta_hat, &fit.theta_prime_hat}) {
        double beta_sum = 0.0;
        for (int j = 0; j < d; ++j) {
          out += ',';
          out += flexseas::format_double((*vec)(j));
          if (j > 0) beta_sum += (*vec)(j);
        }
        out += ',';
        out += flexseas::format_double(-beta_sum);
      }
    } catch (const flexseas::DegenerateWindow& e) {
      out.append(static_cast<std::size_t>(2 * (d + 1)), ',');
      warnings += "t=" + flexseas::format_double(t) + " " + e.what() + "\n";
      ++failed;
    }
    out += '\n';
  }
  const std::string csv_path = out_path(opts, "fit.csv");
  flexseas::write_text_file(csv_path, out);
  std::vector<std::string> outputs = {csv_path};
  if (!warnings.empty()) {
    const std::string warn_path = out_path(opts, "fit.warnings.txt");
    flexseas::write_text_file(warn_path, warnings);
    outputs.push_back(warn_path);
  }
  write_metadata(opts, "fit", config_text, outputs, std::nullopt,
                 "fit.meta.json");
  say(opts, "wrote " + csv_path + " (" + std::to_string(req.grid_points) +
                " grid points, " + std::to_string(failed) + " degenerate)");
  return 0;
}

int cmd_mc(const CommonOpts& opts, const std::string& study) {
  std::string config_text = flexseas::read_text_file(opts.config_path);
  flexseas::ExperimentConfig cfg =
      flexseas::parse_experiment_config(config_text, study);
  if (opts.seed) {
    cfg.base_seed = *opts.seed;
    // Keep the echoed config and its hash in sync with the override.
    json patched = json::parse(config_text);
    patched["base_seed"] = *opts.seed;
    config_text = patched.dump(2) + "\n";
    cfg.raw_json = patched.dump(2);
    cfg.config_hash = flexseas::canonical_json_hash(config_text);
  }
  if (opts.verbose) {
    std::cout << "study=" << study << " curves=" << cfg.curves_echo
              << " error=" << cfg.error_echo
              << " replications=" << cfg.replications << "\n";
  }
  const flexseas::MonteCarloReport report =
      flexseas::run_study(cfg, opts.threads);
  const std::string json_path = out_path(opts, "report.json");
  const std::string csv_path = out_path(opts, "summary.csv");
  flexseas::write_text_file(json_path, report.to_json());
  flexseas::write_text_file(csv_path, report.summary_csv());
  write_metadata(opts, "mc-" + study, config_text, {json_path, csv_path},
                 cfg.base_seed, "report.meta.json");
  say(opts, "wrote " + json_path + " and " + csv_path);
  return 0;
}

int classify_error(const flexseas::Error& e) {
  // 2: the inputs are wrong; 3: the numbers broke down at runtime.
  if (dynamic_cast<const flexseas::DegenerateWindow*>(&e) ||
      dynamic_cast<const flexseas::SummabilityError*>(&e)) {
    return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local linear estimation of flexible seasonal trends"};
  app.set_version_flag("--version", flexseas::kVersion);
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    CommonOpts opts;
    CLI::App* sub = nullptr;
  };
  Cmd commands[] = {
      {"simulate", "synthesize a seasonal panel CSV", {}, nullptr},
      {"fit", "fit trend and seasonal curves to a panel CSV", {}, nullptr},
      {"mc-bias", "Monte Carlo check of the h^2 bias expansion", {}, nullptr},
      {"mc-clt", "Monte Carlo check of the limiting normal law", {}, nullptr},
      {"mc-lemma6", "Monte Carlo check of the kernel-sum variance limit", {},
       nullptr},
      {"mc-rate", "Monte Carlo check of the (nh)^-1/2 rate", {}, nullptr},
  };
  for (auto& cmd : commands) {
    cmd.sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(cmd.sub, cmd.opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    app.exit(e);
    return 2;
  }

  try {
    for (auto& cmd : commands) {
      if (!cmd.sub->parsed()) continue;
      const std::string name = cmd.name;
      if (name == "simulate") return cmd_simulate(cmd.opts);
      if (name == "fit") return cmd_fit(cmd.opts);
      return cmd_mc(cmd.opts, name.substr(3));  // strip "mc-"
    }
  } catch (const flexseas::Error& e) {
    std::cerr << "flexseas: " << e.what() << "\n";
    return classify_error(e);
  } catch (const std::exception& e) {
    std::cerr << "flexseas: InternalError: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
