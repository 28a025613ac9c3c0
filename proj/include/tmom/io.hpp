#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmom/inference.hpp"
#include "tmom/moments.hpp"
#include "tmom/report.hpp"
#include "tmom/selection.hpp"
#include "tmom/signal.hpp"
#include "tmom/simulate.hpp"

namespace tmom {

/// Provenance block embedded in every output file (CSV comment lines or a
/// "_meta" JSON object). Deliberately excludes timestamps so reruns with the
/// same inputs are byte identical.
struct file_meta {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> inputs;  // name, digest
  std::vector<std::pair<std::string, std::string>> notes;   // extra key/value
};

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);
std::string digest_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

// ---- transfer functions -------------------------------------------------

/// CSV with header f_hz,re,im; rows strictly increasing with uniform spacing
/// (1e-6 relative tolerance). Derives f_start, delta_f and the sample count.
frequency_response read_frequency_response_csv(const std::filesystem::path& path);

void write_frequency_response_csv(const std::filesystem::path& path,
                                  const frequency_response& fr,
                                  const file_meta& meta);

// ---- moment matrices -----------------------------------------------------

/// CSV with header m0,m1,...; one realization per row, full double precision.
moment_matrix read_moment_matrix_csv(const std::filesystem::path& path);

void write_moment_matrix_csv(const std::filesystem::path& path,
                             const moment_matrix& m, const file_meta& meta);

void write_standardized_csv(const std::filesystem::path& path,
                            const std::vector<standardized_moments>& rows,
                            const file_meta& meta);

std::vector<standardized_moments> read_standardized_csv(
    const std::filesystem::path& path);

// ---- model parameters and fit results -------------------------------------

struct model_spec {
  model_family family = model_family::mvln;
  fitted_model model;
};

model_spec read_params_json(const std::filesystem::path& path);

void write_fit_result_json(const std::filesystem::path& path,
                           const fit_result& fit, const file_meta& meta);

void write_params_json(const std::filesystem::path& path,
                       const model_spec& spec, const file_meta& meta);

// ---- reports ---------------------------------------------------------------

void write_comparison_csv(const std::filesystem::path& path,
                          const comparison_table& table, const file_meta& meta);

void write_correlation_csv(const std::filesystem::path& path,
                           const std::vector<corr_interval>& rows,
                           const file_meta& meta);

/// CSV dim,theoretical,empirical; the per-dimension reference lines go into
/// comment lines.
void write_qq_csv(const std::filesystem::path& path,
                  const std::vector<qq_data>& dims, const file_meta& meta);

void write_ecdf_csv(const std::filesystem::path& path,
                    const std::vector<ecdf_point>& points, const file_meta& meta);

void write_density_json(const std::filesystem::path& path,
                        const density_report& report, const file_meta& meta);

// ---- synthetic channel configuration ---------------------------------------

synth_channel_config read_channel_config_json(const std::filesystem::path& path);

void write_channel_config_json(const std::filesystem::path& path,
                               const synth_channel_config& cfg,
                               const file_meta& meta);

}  // namespace tmom
