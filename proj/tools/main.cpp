#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tmom/errors.hpp"
#include "tmom/inference.hpp"
#include "tmom/io.hpp"
#include "tmom/models.hpp"
#include "tmom/moments.hpp"
#include "tmom/report.hpp"
#include "tmom/selection.hpp"
#include "tmom/signal.hpp"
#include "tmom/simulate.hpp"
#include "tmom/version.hpp"

namespace fs = std::filesystem;
using namespace tmom;

namespace {

std::uint64_t pick_seed(std::optional<std::uint64_t> requested) {
  if (requested) return *requested;
  std::random_device device;
  const std::uint64_t seed =
      (std::uint64_t(device()) << 32) | std::uint64_t(device());
  std::cout << "seed (auto): " << seed << "\n";
  return seed;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path path(input);
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
          files.push_back(entry.path());
        }
      }
    } else {
      files.push_back(path);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void require_parent(const fs::path& out) {
  const fs::path dir = out.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

std::string format_seconds(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g ns", value * 1e9);
  return buf;
}

// ---- moments ---------------------------------------------------------------

struct moments_options {
  std::vector<std::string> inputs;
  std::string out;
  std::size_t k = 3;
  std::size_t oversampling = 8;
};

int run_moments(const moments_options& opt) {
  const auto files = expand_inputs(opt.inputs);
  if (files.empty()) {
    throw input_error("no input files found");
  }

  std::vector<frequency_response> responses;
  file_meta meta{"moments", std::nullopt, {}, {}};
  std::vector<std::string> failures;
  for (const auto& file : files) {
    try {
      responses.push_back(read_frequency_response_csv(file));
      meta.inputs.emplace_back(file.filename().string(), digest_file(file));
    } catch (const input_error& e) {
      failures.emplace_back(e.what());
      std::cerr << "error: " << e.what() << "\n";
    }
  }
  if (responses.empty()) {
    throw input_error("no input file could be read");
  }
  for (std::size_t i = 1; i < responses.size(); ++i) {
    if (responses[i].n_samples() != responses[0].n_samples() ||
        std::fabs(responses[i].delta_f_hz - responses[0].delta_f_hz) >
            1e-9 * responses[0].delta_f_hz) {
      throw input_error("realizations use different frequency grids ('" +
                        meta.inputs[i].first + "' vs '" +
                        meta.inputs[0].first + "')");
    }
  }

  const auto matrix = batch_moments(responses, opt.k, opt.oversampling);
  meta.notes.emplace_back("k", std::to_string(opt.k));
  meta.notes.emplace_back("oversampling", std::to_string(opt.oversampling));
  require_parent(opt.out);
  write_moment_matrix_csv(opt.out, matrix, meta);
  std::cout << "wrote " << opt.out << " (" << matrix.n_rows() << " x "
            << matrix.dims() << ")\n";
  if (!failures.empty()) {
    std::cerr << failures.size() << " input file(s) failed\n";
    return 2;
  }
  return 0;
}

// ---- fit --------------------------------------------------------------------

struct fit_options {
  std::string input;
  std::string out;
  std::string family = "mvln";
};

int run_fit(const fit_options& opt) {
  const auto data = read_moment_matrix_csv(opt.input);
  const auto fit = fit_model(data, family_from_name(opt.family));
  file_meta meta{"fit", std::nullopt,
                 {{fs::path(opt.input).filename().string(),
                   digest_file(opt.input)}},
                 {}};
  require_parent(opt.out);
  write_fit_result_json(opt.out, fit, meta);
  std::cout << "family " << family_name(fit.family) << ", N = " << fit.n_obs
            << ", loglik = " << fit.log_lik << ", parameters = " << fit.n_params
            << "\n";
  std::cout << "wrote " << opt.out << "\n";
  return 0;
}

// ---- compare ----------------------------------------------------------------

struct compare_options {
  std::string input;
  std::string out;
  std::vector<std::string> families;
  std::string label;
};

int run_compare(const compare_options& opt) {
  const auto data = read_moment_matrix_csv(opt.input);
  std::vector<model_family> families;
  if (opt.families.empty()) {
    families = {model_family::mvln, model_family::mvn,
                model_family::indep_log_normal, model_family::indep_gaussian,
                model_family::indep_gamma};
  } else {
    for (const auto& name : opt.families) {
      families.push_back(family_from_name(name));
    }
  }
  const std::string label =
      opt.label.empty() ? fs::path(opt.input).stem().string() : opt.label;
  const auto table = compare_models(data, families, label);
  std::cout << format_comparison(table);
  file_meta meta{"compare", std::nullopt,
                 {{fs::path(opt.input).filename().string(),
                   digest_file(opt.input)}},
                 {}};
  require_parent(opt.out);
  write_comparison_csv(opt.out, table, meta);
  std::cout << "wrote " << opt.out << "\n";
  return 0;
}

// ---- simulate -----------------------------------------------------------------

struct simulate_options {
  std::string params;
  std::string out_dir;
  std::size_t count = 1000;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const simulate_options& opt) {
  const auto spec = read_params_json(opt.params);
  if (spec.family != model_family::mvln) {
    throw compute_error("simulate requires a model of family mvln");
  }
  const auto& params = std::get<mvln_params>(spec.model);
  const std::uint64_t seed = pick_seed(opt.seed);

  fs::create_directories(opt.out_dir);
  file_meta meta{"simulate", seed,
                 {{fs::path(opt.params).filename().string(),
                   digest_file(opt.params)}},
                 {}};

  const auto raw = sample_mvln(params, opt.count, seed);
  file_meta raw_meta = meta;
  if (raw.jitter > 0.0) {
    raw_meta.notes.emplace_back("jitter", std::to_string(raw.jitter));
  }
  write_moment_matrix_csv(fs::path(opt.out_dir) / "moments.csv", raw.samples,
                          raw_meta);

  if (params.dims() >= 3) {
    const auto standardized = sample_standardized(params, opt.count, seed);
    file_meta std_meta = meta;
    std_meta.notes.emplace_back("rejected_draws",
                                std::to_string(standardized.n_rejected));
    write_standardized_csv(fs::path(opt.out_dir) / "standardized.csv",
                           standardized.samples, std_meta);
    std::cout << "rejected draws: " << standardized.n_rejected << "\n";
  }
  std::cout << "wrote " << (fs::path(opt.out_dir) / "moments.csv").string()
            << "\n";
  return 0;
}

// ---- generate ------------------------------------------------------------------

struct generate_options {
  std::string config;
  std::string out_dir;
  std::size_t count = 100;
  std::optional<std::uint64_t> seed;
};

int run_generate(const generate_options& opt) {
  const auto cfg = read_channel_config_json(opt.config);
  const std::uint64_t seed = pick_seed(opt.seed);
  const auto channels = generate_channels(cfg, opt.count, seed);
  fs::create_directories(opt.out_dir);
  const std::string config_digest = digest_file(opt.config);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "chan_%05zu.csv", i);
    file_meta meta{"generate", seed,
                   {{fs::path(opt.config).filename().string(), config_digest}},
                   {{"realization", std::to_string(i)}}};
    write_frequency_response_csv(fs::path(opt.out_dir) / name, channels[i],
                                 meta);
  }
  std::cout << "wrote " << channels.size() << " transfer functions to "
            << opt.out_dir << "\n";
  return 0;
}

// ---- report ----------------------------------------------------------------------

struct report_options {
  std::string input;
  std::string params;
  std::string out_dir;
  std::size_t bootstrap = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t resolution = 64;
};

int run_report(const report_options& opt) {
  const auto data = read_moment_matrix_csv(opt.input);
  const auto spec = read_params_json(opt.params);
  const std::uint64_t seed = pick_seed(opt.seed);

  fs::create_directories(opt.out_dir);
  file_meta meta{"report", seed,
                 {{fs::path(opt.input).filename().string(),
                   digest_file(opt.input)},
                  {fs::path(opt.params).filename().string(),
                   digest_file(opt.params)}},
                 {}};

  // per-dimension marginals of the fitted model
  std::vector<scalar_marginal> marginals;
  for (std::size_t k = 0; k < data.dims(); ++k) {
    if (spec.family == model_family::mvln) {
      const auto& p = std::get<mvln_params>(spec.model);
      marginals.push_back(
          {marginal_family::log_normal, p.mu()[Eigen::Index(k)],
           std::sqrt(p.sigma()(Eigen::Index(k), Eigen::Index(k)))});
    } else if (spec.family == model_family::mvn) {
      const auto& p = std::get<mvn_params>(spec.model);
      marginals.push_back(
          {marginal_family::gaussian, p.mean()[Eigen::Index(k)],
           std::sqrt(p.cov()(Eigen::Index(k), Eigen::Index(k)))});
    } else {
      const auto& p = std::get<marginal_params>(spec.model);
      if (p.dims.size() != data.dims()) {
        throw compute_error("model and data dimensions differ");
      }
      marginals.push_back(p.dims[k]);
    }
  }

  std::vector<qq_data> qq;
  for (std::size_t k = 0; k < data.dims(); ++k) {
    std::vector<double> column(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      column[i] = data.values()(Eigen::Index(i), Eigen::Index(k));
    }
    qq.push_back(compute_qq(column, marginals[k]));
    write_ecdf_csv(
        fs::path(opt.out_dir) / ("ecdf_m" + std::to_string(k) + ".csv"),
        ecdf(column), meta);
  }
  write_qq_csv(fs::path(opt.out_dir) / "qq.csv", qq, meta);

  if (spec.family == model_family::mvln || spec.family == model_family::mvn) {
    const joint_model joint =
        spec.family == model_family::mvln
            ? joint_model(std::get<mvln_params>(spec.model))
            : joint_model(std::get<mvn_params>(spec.model));
    write_density_json(fs::path(opt.out_dir) / "density.json",
                       density_grid(data, joint, opt.resolution), meta);
  } else {
    std::cout << "density grid skipped (needs a joint model)\n";
  }

  if (data.dims() >= 3) {
    const auto standardized = standardize_rows(data);
    Eigen::MatrixXd cols(standardized.size(), 3);
    for (std::size_t i = 0; i < standardized.size(); ++i) {
      cols(Eigen::Index(i), 0) = standardized[i].p0;
      cols(Eigen::Index(i), 1) = standardized[i].tau_bar_s;
      cols(Eigen::Index(i), 2) = standardized[i].tau_rms_s;
    }
    const std::vector<std::string> names = {"p0", "tau_bar", "tau_rms"};
    for (int c = 0; c < 3; ++c) {
      std::vector<double> column(standardized.size());
      for (std::size_t i = 0; i < standardized.size(); ++i) {
        column[i] = cols(Eigen::Index(i), c);
      }
      write_ecdf_csv(fs::path(opt.out_dir) / ("ecdf_" + names[std::size_t(c)] + ".csv"),
                     ecdf(column), meta);
    }
    const std::vector<std::pair<int, int>> pairs = {{0, 1}, {0, 2}, {1, 2}};
    bootstrap_options boot;
    boot.n_resamples = opt.bootstrap;
    boot.seed = seed;
    const auto corr = bootstrap_corr_ci(cols, names, pairs, boot);
    write_correlation_csv(fs::path(opt.out_dir) / "correlation.csv", corr,
                          meta);
    for (const auto& row : corr) {
      std::printf("%-16s rho = %+.4f (+/- %.4f)\n", row.pair.c_str(), row.rho,
                  row.half_width);
    }
  } else {
    std::cout << "correlations skipped (need at least three moments)\n";
  }
  std::cout << "wrote report files to " << opt.out_dir << "\n";
  return 0;
}

// ---- demo -----------------------------------------------------------------------

struct demo_options {
  std::string out_dir = "demo_out";
  std::uint64_t seed = 7;
};

int run_demo(const demo_options& opt) {
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  synth_channel_config cfg;
  cfg.mean_paths = 25.0;
  cfg.delta_f_hz = 1.0e6;
  cfg.decay_s = 8.0e-8;
  cfg.delay_min_s = 2.0e-8;
  cfg.delay_max_s = 6.0e-7;
  cfg.snr_db = 30.0;
  cfg.n_samples = 128;
  cfg.f_start_hz = 2.4e9;
  write_channel_config_json(dir / "config.json", cfg,
                            {"demo", opt.seed, {}, {}});

  std::cout << "[1/6] generating 200 synthetic transfer functions\n";
  generate_options gen;
  gen.config = (dir / "config.json").string();
  gen.out_dir = (dir / "channels").string();
  gen.count = 200;
  gen.seed = opt.seed;
  run_generate(gen);

  std::cout << "[2/6] computing temporal moments\n";
  moments_options mom;
  mom.inputs = {(dir / "channels").string()};
  mom.out = (dir / "moments.csv").string();
  run_moments(mom);

  std::cout << "[3/6] fitting the joint log-normal model\n";
  fit_options fit;
  fit.input = mom.out;
  fit.out = (dir / "fit.json").string();
  run_fit(fit);

  std::cout << "[4/6] comparing model families\n";
  compare_options cmp;
  cmp.input = mom.out;
  cmp.out = (dir / "comparison.csv").string();
  cmp.label = "demo";
  run_compare(cmp);

  std::cout << "[5/6] simulating from the fitted model\n";
  simulate_options sim;
  sim.params = fit.out;
  sim.out_dir = (dir / "simulated").string();
  sim.count = 2000;
  sim.seed = opt.seed + 1;
  run_simulate(sim);

  std::cout << "[6/6] writing report files\n";
  report_options rep;
  rep.input = mom.out;
  rep.params = fit.out;
  rep.out_dir = (dir / "report").string();
  rep.seed = opt.seed + 2;
  run_report(rep);

  const auto data = read_moment_matrix_csv(mom.out);
  const auto standardized = standardize_rows(data);
  double tau_bar = 0.0, tau_rms = 0.0;
  for (const auto& row : standardized) {
    tau_bar += row.tau_bar_s;
    tau_rms += row.tau_rms_s;
  }
  tau_bar /= double(standardized.size());
  tau_rms /= double(standardized.size());
  std::cout << "mean delay " << format_seconds(tau_bar)
            << ", rms delay spread " << format_seconds(tau_rms) << " over "
            << standardized.size() << " realizations\n";
  std::cout << "demo artifacts in " << opt.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("tmom ") + version +
               " - temporal-moment statistics for wideband radio channels"};
  app.require_subcommand(1);

  moments_options mom;
  auto* cmd_moments = app.add_subcommand(
      "moments", "Compute raw temporal moments from transfer-function CSVs");
  cmd_moments
      ->add_option("inputs", mom.inputs,
                   "transfer-function CSV files or a directory")
      ->required();
  cmd_moments->add_option("--out", mom.out, "output moment-matrix CSV")
      ->required();
  cmd_moments->add_option("--k", mom.k, "number of moments (default 3)");
  cmd_moments->add_option("--oversampling", mom.oversampling,
                          "time-grid oversampling factor (default 8)");

  fit_options fit;
  auto* cmd_fit =
      app.add_subcommand("fit", "Fit a model family by maximum likelihood");
  cmd_fit->add_option("input", fit.input, "moment-matrix CSV")->required();
  cmd_fit->add_option("--out", fit.out, "output fit JSON")->required();
  cmd_fit->add_option(
      "--family", fit.family,
      "mvln | mvn | indep-lognormal | indep-gaussian | indep-gamma");

  compare_options cmp;
  auto* cmd_compare =
      app.add_subcommand("compare", "Rank model families by AIC/BIC");
  cmd_compare->add_option("input", cmp.input, "moment-matrix CSV")->required();
  cmd_compare->add_option("--out", cmp.out, "output comparison CSV")
      ->required();
  cmd_compare->add_option("--family", cmp.families,
                          "families to compare (repeatable; default: all)");
  cmd_compare->add_option("--label", cmp.label, "dataset label for the table");

  simulate_options sim;
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "Sample raw and standardized moments from a fitted model");
  cmd_simulate->add_option("params", sim.params, "model parameter JSON")
      ->required();
  cmd_simulate->add_option("--out", sim.out_dir, "output directory")
      ->required();
  cmd_simulate->add_option("-n,--count", sim.count, "sample count");
  cmd_simulate->add_option("--seed", sim.seed, "RNG seed (auto if absent)");

  generate_options gen;
  auto* cmd_generate = app.add_subcommand(
      "generate", "Generate synthetic multipath channel transfer functions");
  cmd_generate->add_option("config", gen.config, "generator config JSON")
      ->required();
  cmd_generate->add_option("--out", gen.out_dir, "output directory")
      ->required();
  cmd_generate->add_option("-n,--count", gen.count, "realization count");
  cmd_generate->add_option("--seed", gen.seed, "RNG seed (auto if absent)");

  report_options rep;
  auto* cmd_report = app.add_subcommand(
      "report", "Q-Q, ECDF, density-grid and correlation reports");
  cmd_report->add_option("input", rep.input, "moment-matrix CSV")->required();
  cmd_report->add_option("params", rep.params, "model parameter JSON")
      ->required();
  cmd_report->add_option("--out", rep.out_dir, "output directory")->required();
  cmd_report->add_option("--bootstrap", rep.bootstrap,
                         "bootstrap resamples (default 1000)");
  cmd_report->add_option("--seed", rep.seed, "bootstrap seed (auto if absent)");
  cmd_report->add_option("--resolution", rep.resolution,
                         "density grid resolution (default 64)");

  demo_options demo;
  auto* cmd_demo = app.add_subcommand(
      "demo", "End-to-end pipeline on synthetic data with a fixed seed");
  cmd_demo->add_option("--out", demo.out_dir, "output directory");
  cmd_demo->add_option("--seed", demo.seed, "root seed (default 7)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_moments->parsed()) return run_moments(mom);
    if (cmd_fit->parsed()) return run_fit(fit);
    if (cmd_compare->parsed()) return run_compare(cmp);
    if (cmd_simulate->parsed()) return run_simulate(sim);
    if (cmd_generate->parsed()) return run_generate(gen);
    if (cmd_report->parsed()) return run_report(rep);
    if (cmd_demo->parsed()) return run_demo(demo);
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
