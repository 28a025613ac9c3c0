#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tmom/errors.hpp"
#include "tmom/io.hpp"
#include "tmom/simulate.hpp"

using namespace tmom;
namespace fs = std::filesystem;

namespace {

struct temp_dir {
  fs::path path;
  temp_dir() {
    path = fs::temp_directory_path() /
           ("tmom_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~temp_dir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("frequency response round trip") {
  temp_dir dir;
  synth_channel_config cfg;
  cfg.mean_paths = 6.0;
  cfg.delta_f_hz = 1.0e6;
  cfg.decay_s = 5.0e-8;
  cfg.delay_min_s = 0.0;
  cfg.delay_max_s = 4.0e-7;
  cfg.n_samples = 32;
  cfg.f_start_hz = 58.0e9;
  const auto chan = generate_channels(cfg, 1, 3)[0];

  const fs::path file = dir.path / "chan.csv";
  write_frequency_response_csv(file, chan, {"test", 3, {}});
  const auto loaded = read_frequency_response_csv(file);

  CHECK(loaded.n_samples() == chan.n_samples());
  CHECK(loaded.f_start_hz == chan.f_start_hz);
  CHECK(std::fabs(loaded.delta_f_hz - chan.delta_f_hz) <
        1e-9 * chan.delta_f_hz);
  for (std::size_t i = 0; i < chan.n_samples(); ++i) {
    CHECK(loaded.samples[i] == chan.samples[i]);  // 17 digits round-trips
  }

  // metadata comments are present and skipped on read
  const std::string text = read_file(file);
  CHECK(text.find("# tool: tmom") != std::string::npos);
  CHECK(text.find("# seed: 3") != std::string::npos);
}

TEST_CASE("frequency response validation errors carry file and line") {
  temp_dir dir;
  const fs::path bad_header = dir.path / "bad_header.csv";
  write_text(bad_header, "freq,re,im\n1,0,0\n2,0,0\n");
  CHECK_THROWS_AS(read_frequency_response_csv(bad_header), input_error);
  try {
    read_frequency_response_csv(bad_header);
  } catch (const input_error& e) {
    const std::string what = e.what();
    CHECK(what.find("bad_header.csv") != std::string::npos);
    CHECK(what.find(":1") != std::string::npos);
  }

  const fs::path nonuniform = dir.path / "nonuniform.csv";
  write_text(nonuniform, "f_hz,re,im\n0,1,0\n1,1,0\n2.5,1,0\n");
  CHECK_THROWS_AS(read_frequency_response_csv(nonuniform), input_error);

  const fs::path decreasing = dir.path / "decreasing.csv";
  write_text(decreasing, "f_hz,re,im\n0,1,0\n2,1,0\n1,1,0\n");
  CHECK_THROWS_AS(read_frequency_response_csv(decreasing), input_error);

  const fs::path bad_number = dir.path / "bad_number.csv";
  write_text(bad_number, "f_hz,re,im\n0,1,0\n1,x,0\n");
  try {
    read_frequency_response_csv(bad_number);
    FAIL("expected input_error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }

  const fs::path short_row = dir.path / "short_row.csv";
  write_text(short_row, "f_hz,re,im\n0,1,0\n1,1\n");
  CHECK_THROWS_AS(read_frequency_response_csv(short_row), input_error);

  // spacing jitter below the relative tolerance is accepted
  const fs::path wobbly = dir.path / "wobbly.csv";
  write_text(wobbly, "f_hz,re,im\n0,1,0\n1.0000000001,1,0\n2,1,0\n");
  CHECK_NOTHROW(read_frequency_response_csv(wobbly));
}

TEST_CASE("moment matrix round trip at full precision") {
  temp_dir dir;
  Eigen::MatrixXd values(2, 3);
  values << 0.1 + 0.2, 3.141592653589793e-31, 1.0 / 3.0,
      6.02e23, 2.2250738585072014e-308, 0.1;
  const moment_matrix m(values);
  const fs::path file = dir.path / "moments.csv";
  write_moment_matrix_csv(file, m, {"test", std::nullopt, {}});
  const auto loaded = read_moment_matrix_csv(file);
  REQUIRE(loaded.n_rows() == 2);
  REQUIRE(loaded.dims() == 3);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(loaded.values()(i, j) == values(i, j));
    }
  }

  const fs::path wrong = dir.path / "wrong.csv";
  write_text(wrong, "m0,m2\n1,2\n");
  CHECK_THROWS_AS(read_moment_matrix_csv(wrong), input_error);
  const fs::path empty = dir.path / "empty.csv";
  write_text(empty, "m0,m1\n");
  CHECK_THROWS_AS(read_moment_matrix_csv(empty), input_error);
}

TEST_CASE("standardized rows round trip") {
  temp_dir dir;
  const std::vector<standardized_moments> rows = {
      {1.5e-17, 2.5e-8, 1.25e-8}, {2.5e-17, 3.5e-8, 0.0}};
  const fs::path file = dir.path / "standardized.csv";
  write_standardized_csv(file, rows, {"test", 7, {}});
  const auto loaded = read_standardized_csv(file);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].p0 == rows[0].p0);
  CHECK(loaded[0].tau_bar_s == rows[0].tau_bar_s);
  CHECK(loaded[1].tau_rms_s == 0.0);
}

TEST_CASE("params json round trips every family") {
  temp_dir dir;

  const auto mvln_spec = model_spec{
      model_family::mvln, fitted_model(fixtures::params(fixtures::lund()))};
  const fs::path mvln_file = dir.path / "mvln.json";
  write_params_json(mvln_file, mvln_spec, {"test", std::nullopt, {}});
  const auto mvln_loaded = read_params_json(mvln_file);
  CHECK(mvln_loaded.family == model_family::mvln);
  const auto& p = std::get<mvln_params>(mvln_loaded.model);
  const auto& q = std::get<mvln_params>(mvln_spec.model);
  CHECK((p.mu() - q.mu()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.sigma() - q.sigma()).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd mean(2);
  mean << 4.0, -1.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.3, 0.3, 1.0;
  const auto mvn_spec =
      model_spec{model_family::mvn, fitted_model(mvn_params(mean, cov))};
  const fs::path mvn_file = dir.path / "mvn.json";
  write_params_json(mvn_file, mvn_spec, {"test", std::nullopt, {}});
  const auto mvn_loaded = read_params_json(mvn_file);
  CHECK(mvn_loaded.family == model_family::mvn);
  CHECK(std::get<mvn_params>(mvn_loaded.model).cov()(0, 1) == 0.3);

  const auto gamma_spec = model_spec{
      model_family::indep_gamma,
      fitted_model(make_marginal_params(
          marginal_family::gamma, {{marginal_family::gamma, 2.0, 3.0},
                                   {marginal_family::gamma, 1.5, 0.5}}))};
  const fs::path gamma_file = dir.path / "gamma.json";
  write_params_json(gamma_file, gamma_spec, {"test", std::nullopt, {}});
  const auto gamma_loaded = read_params_json(gamma_file);
  CHECK(gamma_loaded.family == model_family::indep_gamma);
  CHECK(std::get<marginal_params>(gamma_loaded.model).dims[1].b == 0.5);

  // invalid inputs
  const fs::path junk = dir.path / "junk.json";
  write_text(junk, "{ not json");
  CHECK_THROWS_AS(read_params_json(junk), input_error);
  const fs::path no_family = dir.path / "no_family.json";
  write_text(no_family, "{\"k\": 3}");
  CHECK_THROWS_AS(read_params_json(no_family), input_error);
  const fs::path bad_sigma = dir.path / "bad_sigma.json";
  write_text(bad_sigma,
             "{\"family\":\"mvln\",\"mu\":[0,0],\"sigma\":[[1,2],[2,1]]}");
  CHECK_THROWS_AS(read_params_json(bad_sigma), input_error);
}

TEST_CASE("fit result json records ci in canonical order") {
  temp_dir dir;
  const auto data = sample_mvln(fixtures::params(fixtures::lund()), 300, 15);
  const auto fit = fit_mvln(data.samples);
  const fs::path file = dir.path / "fit.json";
  write_fit_result_json(file, fit, {"fit", 15, {{"moments.csv", "abcd"}}});

  const std::string text = read_file(file);
  CHECK(text.find("\"log_likelihood\"") != std::string::npos);
  CHECK(text.find("\"n_params\": 9") != std::string::npos);
  CHECK(text.find("\"n_obs\": 300") != std::string::npos);
  // canonical ci order is preserved in the emitted object
  const auto pos = [&](const char* key) { return text.find(key); };
  CHECK(pos("\"mu0\"") < pos("\"mu1\""));
  CHECK(pos("\"mu2\"") < pos("\"sigma00\""));
  CHECK(pos("\"sigma00\"") < pos("\"sigma01\""));
  CHECK(pos("\"sigma12\"") < pos("\"sigma22\""));
  CHECK(text.find("abcd") != std::string::npos);

  // a fit result file loads back as a parameter spec
  const auto loaded = read_params_json(file);
  CHECK(loaded.family == model_family::mvln);
}

TEST_CASE("comparison and correlation csv formats") {
  temp_dir dir;
  const auto data = sample_mvln(fixtures::params(fixtures::lund()), 100, 2);
  const model_family fams[] = {model_family::mvln, model_family::mvn};
  const auto table = compare_models(data.samples, fams, "lund-sim");
  const fs::path cmp = dir.path / "cmp.csv";
  write_comparison_csv(cmp, table, {"compare", std::nullopt, {}});
  const std::string text = read_file(cmp);
  CHECK(text.find("family,loglik,k,aic,bic,rank") != std::string::npos);
  CHECK(text.find("# dataset: lund-sim") != std::string::npos);
  CHECK(text.find("mvln,") != std::string::npos);

  const std::vector<corr_interval> rows = {
      {"p0_tau_bar", -0.65, 0.03, -0.68, -0.61, 1000, 0}};
  const fs::path corr = dir.path / "corr.csv";
  write_correlation_csv(corr, rows, {"report", 5, {}});
  const std::string corr_text = read_file(corr);
  CHECK(corr_text.find("pair,rho,epsilon,n_resamples,pct_lo,pct_hi") !=
        std::string::npos);
  CHECK(corr_text.find("p0_tau_bar,-0.65") != std::string::npos);
}

TEST_CASE("qq and ecdf writers") {
  temp_dir dir;
  qq_data qq;
  qq.theoretical = {1.0, 2.0};
  qq.empirical = {1.1, 2.2};
  qq.line_slope = 1.1;
  qq.line_intercept = 0.0;
  const fs::path qq_file = dir.path / "qq.csv";
  write_qq_csv(qq_file, {qq}, {"report", std::nullopt, {}});
  const std::string text = read_file(qq_file);
  CHECK(text.find("dim,theoretical,empirical") != std::string::npos);
  CHECK(text.find("# line: dim=0 slope=1.1") != std::string::npos);
  CHECK(text.find("0,1,1.1") != std::string::npos);

  const fs::path ecdf_file = dir.path / "ecdf.csv";
  write_ecdf_csv(ecdf_file, {{1.0, 0.5}, {2.0, 1.0}},
                 {"report", std::nullopt, {}});
  const std::string etext = read_file(ecdf_file);
  CHECK(etext.find("value,fraction") != std::string::npos);
  CHECK(etext.find("2,1\n") != std::string::npos);
}

TEST_CASE("channel config json round trip") {
  temp_dir dir;
  synth_channel_config cfg;
  cfg.mean_paths = 15.0;
  cfg.decay_s = 1.0e-7;
  cfg.delay_min_s = 1.0e-8;
  cfg.delay_max_s = 5.0e-7;
  cfg.snr_db = 25.0;
  cfg.n_samples = 256;
  cfg.delta_f_hz = 1.0e6;
  cfg.f_start_hz = 28.0e9;
  const fs::path file = dir.path / "config.json";
  write_channel_config_json(file, cfg, {"generate", std::nullopt, {}});
  const auto loaded = read_channel_config_json(file);
  CHECK(loaded.mean_paths == cfg.mean_paths);
  CHECK(loaded.decay_s == cfg.decay_s);
  CHECK(loaded.snr_db.has_value());
  CHECK(*loaded.snr_db == 25.0);
  CHECK(loaded.n_samples == 256);
  CHECK(loaded.f_start_hz == 28.0e9);

  // optional noise field really is optional
  const fs::path noiseless = dir.path / "noiseless.json";
  write_text(noiseless,
             "{\"mean_paths\":5,\"decay_s\":1e-7,\"delay_min_s\":0,"
             "\"delay_max_s\":5e-7,\"n_samples\":64,\"delta_f_hz\":1e6}");
  const auto nl = read_channel_config_json(noiseless);
  CHECK(!nl.snr_db.has_value());

  // invalid configs are rejected at parse time
  const fs::path aliased = dir.path / "aliased.json";
  write_text(aliased,
             "{\"mean_paths\":5,\"decay_s\":1e-7,\"delay_min_s\":0,"
             "\"delay_max_s\":2e-6,\"n_samples\":64,\"delta_f_hz\":1e6}");
  CHECK_THROWS_AS(read_channel_config_json(aliased), input_error);
}

TEST_CASE("digest is stable and input-sensitive") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
  CHECK(fnv1a64_hex("tmom") == fnv1a64_hex("tmom"));

  temp_dir dir;
  const fs::path file = dir.path / "blob.bin";
  write_text(file, "payload");
  CHECK(digest_file(file) == fnv1a64_hex("payload"));
}
