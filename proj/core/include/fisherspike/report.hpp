// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fisherspike/config.hpp"
#include "fisherspike/omega_probe.hpp"
#include "fisherspike/simulate.hpp"
#include "fisherspike/theory.hpp"

namespace fisherspike {

/// Comma-separated table. Lines starting with '#' before the header carry
/// "key=value" metadata.
struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  /// Throws kParse on ragged rows or a missing header.
  static CsvTable parse(std::string_view text, std::string_view source = "<csv>");
  std::size_t column(std::string_view name) const;
};

enum class PlotKind { kQq, kDensity1d, kContour2d };

std::string_view to_string(PlotKind kind) noexcept;
PlotKind parse_plot_kind(std::string_view name);

struct PlotDataset {
  PlotKind kind = PlotKind::kQq;
  std::string name;
  std::vector<std::string> columns;
  /// series[c] holds column c.
  std::vector<std::vector<double>> series;
  std::map<std::string, std::string> meta;

  /// Throws kInvalidArgument unless the kind's shape rules hold: qq columns
  /// sorted and of equal length, density1d integrating to one within 1e-9,
  /// contour2d on a full rectangular grid.
  void validate() const;
  CsvTable to_csv() const;
  static PlotDataset from_csv(const CsvTable& table);
};

/// Q-Q pairs of the sorted sample against N(0, sd^2) quantiles.
PlotDataset make_qq(std::string name, std::vector<double> sample, double sd);
/// Histogram density with a N(0, sd^2) overlay at the bin centres.
PlotDataset make_density1d(std::string name, const std::vector<double>& sample, double sd);
/// Normalised 2-D histogram on an nx x ny grid over the given box.
PlotDataset make_contour2d(std::string name, const std::vector<double>& xs,
                           const std::vector<double>& ys, double lo_x, double hi_x, double lo_y,
                           double hi_y, std::size_t bins);

KeyValueDocument theory_document(const ModelConfig& config, const TheoryTable& table);

/// rep,group,index,value with 1-based spike group and index.
CsvTable gamma_table(const ModelConfig& config, const McReport& report);
/// rep,status,bulk_contained for every requested replication.
CsvTable replication_table(const McReport& report);
KeyValueDocument summary_document(const ModelConfig& config, const McReport& report);

/// QQ and density per single spike group; empirical and theoretical
/// contours per group of multiplicity two or more.
std::vector<PlotDataset> plot_datasets(const ModelConfig& config, const McReport& report,
                                       std::size_t limit_draws = 20000);

/// Inverse of gamma_table / replication_table followed by finalize_report.
McReport report_from_tables(const ModelConfig& config, std::span<const CltLaw> laws,
                            const CsvTable& gamma, const CsvTable& replications,
                            const RunOptions& options = {});

KeyValueDocument universality_document(const ModelConfig& a, const ModelConfig& b,
                                       const UniversalityReport& report);
/// config,rep,row,col,value for both arms of the comparison.
CsvTable omega_table(const UniversalityReport& report);

/// Output file names inside a simulate directory.
namespace files {
inline constexpr std::string_view kConfig = "config.ini";
inline constexpr std::string_view kTheory = "theory.txt";
inline constexpr std::string_view kGamma = "gamma.csv";
inline constexpr std::string_view kReplications = "replications.csv";
inline constexpr std::string_view kSummary = "summary.txt";
inline constexpr std::string_view kPlots = "plots";
inline constexpr std::string_view kUniversality = "universality.txt";
inline constexpr std::string_view kOmega = "omega.csv";
}  // namespace files

/// Writes text to a file, creating parent directories; throws kIo.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Writes summary, plots and their CSV sources for a finished run.
void write_simulation(const std::filesystem::path& dir, const ModelConfig& config,
                      const TheoryTable& table, const McReport& report);

/// Rebuilds summary.txt and plots/ of a simulate directory from its
/// config.ini, gamma.csv and replications.csv. Returns the rebuilt report.
McReport rebuild_simulation(const std::filesystem::path& dir);

}  // namespace fisherspike
