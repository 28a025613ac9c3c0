#include "tmom/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmom/errors.hpp"
#include "tmom/version.hpp"

namespace tmom {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

double parse_double(std::string_view field, const std::filesystem::path& path,
                    std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw input_error(location(path, line) + ": cannot parse number '" +
                      std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

struct csv_file {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;  // source line numbers for messages
};

csv_file read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw input_error("cannot open " + path.string());
  }
  csv_file out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (!have_header) {
      for (const auto& f : fields) out.header.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != out.header.size()) {
      throw input_error(location(path, line_no) + ": expected " +
                        std::to_string(out.header.size()) + " columns, got " +
                        std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = parse_double(fields[i], path, line_no);
    }
    out.rows.push_back(std::move(row));
    out.row_lines.push_back(line_no);
  }
  if (!have_header) {
    throw input_error(path.string() + ": missing header line");
  }
  return out;
}

void require_header(const csv_file& csv, const std::vector<std::string>& want,
                    const std::filesystem::path& path) {
  if (csv.header != want) {
    std::string expected;
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (i) expected += ",";
      expected += want[i];
    }
    std::string got;
    for (std::size_t i = 0; i < csv.header.size(); ++i) {
      if (i) got += ",";
      got += csv.header[i];
    }
    throw input_error(path.string() + ":1: expected header '" + expected +
                      "', got '" + got + "'");
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw input_error("cannot write " + path.string());
  }
  return out;
}

void write_meta_comments(std::ofstream& out, const file_meta& meta) {
  out << "# tool: tmom " << version << "\n";
  if (!meta.command.empty()) out << "# command: " << meta.command << "\n";
  if (meta.seed) out << "# seed: " << *meta.seed << "\n";
  for (const auto& [name, digest] : meta.inputs) {
    out << "# input: " << name << " fnv1a64=" << digest << "\n";
  }
  for (const auto& [key, value] : meta.notes) {
    out << "# " << key << ": " << value << "\n";
  }
}

json meta_json(const file_meta& meta) {
  json j;
  j["tool"] = std::string("tmom ") + version;
  if (!meta.command.empty()) j["command"] = meta.command;
  if (meta.seed) j["seed"] = *meta.seed;
  if (!meta.inputs.empty()) {
    json inputs = json::array();
    for (const auto& [name, digest] : meta.inputs) {
      inputs.push_back({{"name", name}, {"fnv1a64", digest}});
    }
    j["inputs"] = inputs;
  }
  for (const auto& [key, value] : meta.notes) {
    j[key] = value;
  }
  return j;
}

json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw input_error("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string digest_file(const std::filesystem::path& path) {
  return fnv1a64_hex(read_file(path));
}

frequency_response read_frequency_response_csv(
    const std::filesystem::path& path) {
  const csv_file csv = read_csv(path);
  require_header(csv, {"f_hz", "re", "im"}, path);
  if (csv.rows.size() < 2) {
    throw input_error(path.string() + ": need at least 2 frequency samples");
  }

  const std::size_t n = csv.rows.size();
  const double f_start = csv.rows.front()[0];
  const double f_end = csv.rows.back()[0];
  const double delta_f = (f_end - f_start) / double(n - 1);
  if (!(delta_f > 0.0)) {
    throw input_error(path.string() + ": frequencies must be increasing");
  }

  std::vector<std::complex<double>> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = {csv.rows[i][1], csv.rows[i][2]};
    if (i == 0) continue;
    const double spacing = csv.rows[i][0] - csv.rows[i - 1][0];
    if (!(spacing > 0.0)) {
      throw input_error(location(path, csv.row_lines[i]) +
                        ": frequencies must be strictly increasing");
    }
    if (std::fabs(spacing - delta_f) > 1e-6 * delta_f) {
      throw input_error(location(path, csv.row_lines[i]) +
                        ": non-uniform frequency spacing (" +
                        format_double(spacing) + " vs " + format_double(delta_f) +
                        ")");
    }
  }
  try {
    return make_frequency_response(std::move(samples), f_start, delta_f);
  } catch (const compute_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }
}

void write_frequency_response_csv(const std::filesystem::path& path,
                                  const frequency_response& fr,
                                  const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  out << "f_hz,re,im\n";
  for (std::size_t n = 0; n < fr.n_samples(); ++n) {
    const double f = fr.f_start_hz + double(n) * fr.delta_f_hz;
    out << format_double(f) << "," << format_double(fr.samples[n].real()) << ","
        << format_double(fr.samples[n].imag()) << "\n";
  }
}

moment_matrix read_moment_matrix_csv(const std::filesystem::path& path) {
  const csv_file csv = read_csv(path);
  if (csv.header.empty() || csv.header[0] != "m0") {
    throw input_error(path.string() + ":1: expected header m0,m1,...");
  }
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    if (csv.header[i] != "m" + std::to_string(i)) {
      throw input_error(path.string() + ":1: expected column m" +
                        std::to_string(i) + ", got " + csv.header[i]);
    }
  }
  if (csv.rows.empty()) {
    throw input_error(path.string() + ": no data rows");
  }
  Eigen::MatrixXd values(csv.rows.size(), csv.header.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    for (std::size_t j = 0; j < csv.header.size(); ++j) {
      values(Eigen::Index(i), Eigen::Index(j)) = csv.rows[i][j];
    }
  }
  try {
    return moment_matrix(std::move(values));
  } catch (const compute_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }
}

void write_moment_matrix_csv(const std::filesystem::path& path,
                             const moment_matrix& m, const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  for (std::size_t j = 0; j < m.dims(); ++j) {
    out << (j ? "," : "") << "m" << j;
  }
  out << "\n";
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    for (std::size_t j = 0; j < m.dims(); ++j) {
      if (j) out << ",";
      out << format_double(m.values()(Eigen::Index(i), Eigen::Index(j)));
    }
    out << "\n";
  }
}

void write_standardized_csv(const std::filesystem::path& path,
                            const std::vector<standardized_moments>& rows,
                            const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  out << "p0,tau_bar_s,tau_rms_s\n";
  for (const auto& row : rows) {
    out << format_double(row.p0) << "," << format_double(row.tau_bar_s) << ","
        << format_double(row.tau_rms_s) << "\n";
  }
}

std::vector<standardized_moments> read_standardized_csv(
    const std::filesystem::path& path) {
  const csv_file csv = read_csv(path);
  require_header(csv, {"p0", "tau_bar_s", "tau_rms_s"}, path);
  std::vector<standardized_moments> out;
  out.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    out.push_back({row[0], row[1], row[2]});
  }
  return out;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw input_error(what + " must be a non-empty array");
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[Eigen::Index(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw input_error(what + " must be a non-empty array of arrays");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) {
      throw input_error(what + " has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(Eigen::Index(i), Eigen::Index(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

json model_to_json(const model_spec& spec) {
  json j;
  j["family"] = family_name(spec.family);
  if (std::holds_alternative<mvln_params>(spec.model)) {
    const auto& p = std::get<mvln_params>(spec.model);
    j["k"] = p.dims();
    j["mu"] = vector_to_json(p.mu());
    j["sigma"] = matrix_to_json(p.sigma());
  } else if (std::holds_alternative<mvn_params>(spec.model)) {
    const auto& p = std::get<mvn_params>(spec.model);
    j["k"] = p.dims();
    j["mean"] = vector_to_json(p.mean());
    j["cov"] = matrix_to_json(p.cov());
  } else {
    const auto& p = std::get<marginal_params>(spec.model);
    j["k"] = p.dims.size();
    json marginals = json::array();
    for (const auto& d : p.dims) {
      marginals.push_back({d.a, d.b});
    }
    j["marginals"] = marginals;
  }
  return j;
}

}  // namespace

model_spec read_params_json(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  if (!j.contains("family")) {
    throw input_error(path.string() + ": missing 'family'");
  }
  model_spec spec;
  spec.family = family_from_name(j["family"].get<std::string>());
  try {
    switch (spec.family) {
      case model_family::mvln:
        spec.model = mvln_params(vector_from_json(j.at("mu"), "mu"),
                                 matrix_from_json(j.at("sigma"), "sigma"));
        break;
      case model_family::mvn:
        spec.model = mvn_params(vector_from_json(j.at("mean"), "mean"),
                                matrix_from_json(j.at("cov"), "cov"));
        break;
      default: {
        marginal_family family = marginal_family::log_normal;
        if (spec.family == model_family::indep_gaussian) {
          family = marginal_family::gaussian;
        } else if (spec.family == model_family::indep_gamma) {
          family = marginal_family::gamma;
        }
        const json& marginals = j.at("marginals");
        std::vector<scalar_marginal> dims;
        for (const auto& pair : marginals) {
          if (!pair.is_array() || pair.size() != 2) {
            throw input_error("each marginal must be a [a, b] pair");
          }
          dims.push_back({family, pair[0].get<double>(), pair[1].get<double>()});
        }
        spec.model = make_marginal_params(family, std::move(dims));
        break;
      }
    }
  } catch (const json::exception& e) {
    throw input_error(path.string() + ": " + e.what());
  } catch (const compute_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }
  return spec;
}

void write_params_json(const std::filesystem::path& path,
                       const model_spec& spec, const file_meta& meta) {
  json j = model_to_json(spec);
  j["_meta"] = meta_json(meta);
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

void write_fit_result_json(const std::filesystem::path& path,
                           const fit_result& fit, const file_meta& meta) {
  json j = model_to_json(model_spec{fit.family, fit.model});
  j["log_likelihood"] = fit.log_lik;
  j["n_params"] = fit.n_params;
  j["n_obs"] = fit.n_obs;
  if (!fit.ci.empty()) {
    json ci;
    for (const auto& entry : fit.ci) {
      ci[entry.name] = entry.half_width;
    }
    j["ci"] = ci;
  }
  j["_meta"] = meta_json(meta);
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

void write_comparison_csv(const std::filesystem::path& path,
                          const comparison_table& table, const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  if (!table.dataset_label.empty()) {
    out << "# dataset: " << table.dataset_label << "\n";
  }
  out << "family,loglik,k,aic,bic,rank\n";
  for (const auto& row : table.rows) {
    if (!row.applicable) {
      out << family_name(row.family) << ",n/a,n/a,n/a,n/a,n/a\n";
      continue;
    }
    out << family_name(row.family) << "," << format_double(row.log_lik) << ","
        << row.n_params << "," << format_double(row.aic_value) << ","
        << format_double(row.bic_value) << "," << row.rank << "\n";
  }
}

void write_correlation_csv(const std::filesystem::path& path,
                           const std::vector<corr_interval>& rows,
                           const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  // pct_lo / pct_hi carry the percentile interval alongside the symmetric one.
  out << "pair,rho,epsilon,n_resamples,pct_lo,pct_hi\n";
  for (const auto& row : rows) {
    out << row.pair << "," << format_double(row.rho) << ","
        << format_double(row.half_width) << "," << row.n_resamples << ","
        << format_double(row.pct_lo) << "," << format_double(row.pct_hi) << "\n";
  }
}

void write_qq_csv(const std::filesystem::path& path,
                  const std::vector<qq_data>& dims, const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  for (std::size_t d = 0; d < dims.size(); ++d) {
    out << "# line: dim=" << d << " slope=" << format_double(dims[d].line_slope)
        << " intercept=" << format_double(dims[d].line_intercept) << "\n";
  }
  out << "dim,theoretical,empirical\n";
  for (std::size_t d = 0; d < dims.size(); ++d) {
    for (std::size_t i = 0; i < dims[d].theoretical.size(); ++i) {
      out << d << "," << format_double(dims[d].theoretical[i]) << ","
          << format_double(dims[d].empirical[i]) << "\n";
    }
  }
}

void write_ecdf_csv(const std::filesystem::path& path,
                    const std::vector<ecdf_point>& points,
                    const file_meta& meta) {
  std::ofstream out = open_output(path);
  write_meta_comments(out, meta);
  out << "value,fraction\n";
  for (const auto& p : points) {
    out << format_double(p.value) << "," << format_double(p.fraction) << "\n";
  }
}

void write_density_json(const std::filesystem::path& path,
                        const density_report& report, const file_meta& meta) {
  json j;
  json pairs = json::array();
  for (const auto& grid : report.pairs) {
    json g;
    g["pair"] = {grid.dim_x, grid.dim_y};
    g["x_grid"] = grid.x_grid;
    g["y_grid"] = grid.y_grid;
    g["density"] = grid.density;
    g["contour_levels"] = grid.contour_levels;
    pairs.push_back(std::move(g));
  }
  j["pairs"] = std::move(pairs);
  json kde = json::array();
  for (const auto& curve : report.kde) {
    json c;
    c["dim"] = curve.dim;
    c["grid"] = curve.grid;
    c["density"] = curve.density;
    kde.push_back(std::move(c));
  }
  j["kde"] = std::move(kde);
  j["_meta"] = meta_json(meta);
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

synth_channel_config read_channel_config_json(
    const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  synth_channel_config cfg;
  try {
    cfg.mean_paths = j.at("mean_paths").get<double>();
    cfg.decay_s = j.at("decay_s").get<double>();
    cfg.delay_min_s = j.at("delay_min_s").get<double>();
    cfg.delay_max_s = j.at("delay_max_s").get<double>();
    cfg.n_samples = j.at("n_samples").get<std::size_t>();
    cfg.delta_f_hz = j.at("delta_f_hz").get<double>();
    if (j.contains("snr_db")) cfg.snr_db = j["snr_db"].get<double>();
    if (j.contains("f_start_hz")) cfg.f_start_hz = j["f_start_hz"].get<double>();
  } catch (const json::exception& e) {
    throw input_error(path.string() + ": " + e.what());
  }
  try {
    validate(cfg);
  } catch (const compute_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }
  return cfg;
}

void write_channel_config_json(const std::filesystem::path& path,
                               const synth_channel_config& cfg,
                               const file_meta& meta) {
  json j;
  j["mean_paths"] = cfg.mean_paths;
  j["decay_s"] = cfg.decay_s;
  j["delay_min_s"] = cfg.delay_min_s;
  j["delay_max_s"] = cfg.delay_max_s;
  if (cfg.snr_db) j["snr_db"] = *cfg.snr_db;
  j["n_samples"] = cfg.n_samples;
  j["delta_f_hz"] = cfg.delta_f_hz;
  j["f_start_hz"] = cfg.f_start_hz;
  j["_meta"] = meta_json(meta);
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

}  // namespace tmom
