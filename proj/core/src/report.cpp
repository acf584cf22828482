// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "fisherspike/error.hpp"
#include "fisherspike/stats.hpp"

namespace fisherspike {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t group_number(const ModelConfig& config, double alpha) {
  const auto groups = config.spikes.groups();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].alpha == alpha) return k + 1;
  }
  throw Error(ErrorCode::kConfig, "no spike group for alpha=" + format_double(alpha));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const auto j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (pos - static_cast<double>(i)) * (sorted[j] - sorted[i]);
}

std::string group_section(std::size_t k) { return "group." + std::to_string(k); }

}  // namespace

std::string CsvTable::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

CsvTable CsvTable::parse(std::string_view text, std::string_view source) {
  CsvTable t;
  std::size_t pos = 0;
  int line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!have_header && line.front() == '#') {
      line.remove_prefix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      t.meta[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
      continue;
    }
    auto cells = split_csv_line(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::kParse, std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(t.header.size()) + " cells, got " +
                                         std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw Error(ErrorCode::kParse, std::string(source) + ": missing CSV header");
  return t;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kParse, "CSV has no column '" + std::string(name) + "'");
}

std::string_view to_string(PlotKind kind) noexcept {
  switch (kind) {
    case PlotKind::kQq: return "qq";
    case PlotKind::kDensity1d: return "density1d";
    case PlotKind::kContour2d: return "contour2d";
  }
  return "unknown";
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "qq") return PlotKind::kQq;
  if (name == "density1d") return PlotKind::kDensity1d;
  if (name == "contour2d") return PlotKind::kContour2d;
  throw Error(ErrorCode::kParse, "unknown plot kind '" + std::string(name) + "'");
}

void PlotDataset::validate() const {
  if (columns.size() != series.size() || series.empty()) {
    throw Error(ErrorCode::kInvalidArgument, name + ": columns and series disagree");
  }
  const auto n = series.front().size();
  for (const auto& s : series) {
    if (s.size() != n) throw Error(ErrorCode::kInvalidArgument, name + ": ragged series");
  }
  switch (kind) {
    case PlotKind::kQq:
      for (const auto& s : series) {
        if (!std::is_sorted(s.begin(), s.end())) {
          throw Error(ErrorCode::kInvalidArgument, name + ": qq series must be sorted");
        }
      }
      break;
    case PlotKind::kDensity1d: {
      if (n < 2) throw Error(ErrorCode::kInvalidArgument, name + ": density needs two bins");
      const double width = series[0][1] - series[0][0];
      double total = 0.0;
      for (double d : series[1]) total += d * width;
      if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::kInvalidArgument, name + ": density integrates to " + format_double(total));
      }
      break;
    }
    case PlotKind::kContour2d: {
      const std::set<double> xs(series[0].begin(), series[0].end());
      const std::set<double> ys(series[1].begin(), series[1].end());
      if (xs.size() * ys.size() != n) {
        throw Error(ErrorCode::kInvalidArgument, name + ": contour grid is not rectangular");
      }
      break;
    }
  }
}

CsvTable PlotDataset::to_csv() const {
  CsvTable t;
  t.meta = meta;
  t.meta["kind"] = std::string(to_string(kind));
  t.meta["name"] = name;
  t.header = columns;
  const auto n = series.empty() ? 0 : series.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row;
    for (const auto& s : series) row.push_back(format_double(s[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

PlotDataset PlotDataset::from_csv(const CsvTable& table) {
  PlotDataset d;
  d.meta = table.meta;
  const auto kind = d.meta.find("kind");
  if (kind == d.meta.end()) throw Error(ErrorCode::kParse, "plot CSV lacks a kind");
  d.kind = parse_plot_kind(kind->second);
  d.name = d.meta["name"];
  d.meta.erase("kind");
  d.meta.erase("name");
  d.columns = table.header;
  d.series.assign(d.columns.size(), {});
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) d.series[c].push_back(parse_double(row[c]));
  }
  return d;
}

PlotDataset make_qq(std::string name, std::vector<double> sample, double sd) {
  if (sample.empty()) throw Error(ErrorCode::kInvalidArgument, "qq needs data");
  std::sort(sample.begin(), sample.end());
  std::vector<double> theory;
  const auto n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    theory.push_back(normal_quantile((static_cast<double>(i) + 0.5) / n, sd));
  }
  return {PlotKind::kQq, std::move(name), {"theoretical", "empirical"}, {theory, sample}, {}};
}

PlotDataset make_density1d(std::string name, const std::vector<double>& sample, double sd) {
  if (sample.size() < 2) throw Error(ErrorCode::kInvalidArgument, "density needs two points");
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const double span = std::max(*hi_it - *lo_it, 1e-12);
  const double lo = *lo_it - 1e-9 * span;
  const double hi = *hi_it + 1e-9 * span;
  const auto bins = static_cast<std::size_t>(
      std::max(2.0, std::ceil(2.0 * std::cbrt(static_cast<double>(sample.size())))));
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : sample) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  PlotDataset d{PlotKind::kDensity1d, std::move(name), {"x", "empirical", "theoretical"}, {{}, {}, {}}, {}};
  const double norm = 1.0 / (static_cast<double>(sample.size()) * width);
  for (std::size_t b = 0; b < bins; ++b) {
    const double x = lo + (static_cast<double>(b) + 0.5) * width;
    d.series[0].push_back(x);
    d.series[1].push_back(counts[b] * norm);
    d.series[2].push_back(std::exp(-0.5 * x * x / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi)));
  }
  return d;
}

PlotDataset make_contour2d(std::string name, const std::vector<double>& xs,
                           const std::vector<double>& ys, double lo_x, double hi_x, double lo_y,
                           double hi_y, std::size_t bins) {
  if (xs.size() != ys.size() || xs.empty()) throw Error(ErrorCode::kInvalidArgument, "contour needs paired data");
  if (bins < 2 || !(hi_x > lo_x) || !(hi_y > lo_y)) throw Error(ErrorCode::kInvalidArgument, "bad contour grid");
  const double wx = (hi_x - lo_x) / static_cast<double>(bins);
  const double wy = (hi_y - lo_y) / static_cast<double>(bins);
  std::vector<double> counts(bins * bins, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < lo_x || xs[i] >= hi_x || ys[i] < lo_y || ys[i] >= hi_y) continue;
    const auto bx = std::min(static_cast<std::size_t>((xs[i] - lo_x) / wx), bins - 1);
    const auto by = std::min(static_cast<std::size_t>((ys[i] - lo_y) / wy), bins - 1);
    counts[bx * bins + by] += 1.0;
  }
  PlotDataset d{PlotKind::kContour2d, std::move(name), {"x", "y", "density"}, {{}, {}, {}}, {}};
  const double norm = 1.0 / (static_cast<double>(xs.size()) * wx * wy);
  for (std::size_t bx = 0; bx < bins; ++bx) {
    for (std::size_t by = 0; by < bins; ++by) {
      d.series[0].push_back(lo_x + (static_cast<double>(bx) + 0.5) * wx);
      d.series[1].push_back(lo_y + (static_cast<double>(by) + 0.5) * wy);
      d.series[2].push_back(counts[bx * bins + by] * norm);
    }
  }
  return d;
}

KeyValueDocument theory_document(const ModelConfig& config, const TheoryTable& table) {
  KeyValueDocument doc;
  doc.add_section("run");
  doc.set("fingerprint", fingerprint_hex(config_fingerprint(config)));
  doc.set("c1", table.ratios.c1);
  doc.set("c2", table.ratios.c2);
  doc.set_int("scale_dim", table.scale_dim);
  doc.set("regime", std::string(to_string(table.regime)));
  doc.set("backend", std::string(table.backend == StieltjesBackend::kQuadrature ? "quadrature" : "montecarlo"));
  if (table.bulk) {
    doc.add_section("bulk");
    doc.set("lower", table.bulk->lower);
    doc.set("upper", table.bulk->upper);
  }
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    doc.add_section(group_section(k + 1));
    doc.set("alpha", row.phase.alpha);
    doc.set_int("multiplicity", row.multiplicity);
    doc.set("psi_n", row.phase.psi_n);
    doc.set("psi_prime", row.phase.psi_prime);
    doc.set("distant", std::string(row.phase.distant ? "true" : "false"));
    doc.set("rho", row.phase.rho);
    if (row.phase.critical_alpha) doc.set("critical_alpha", *row.phase.critical_alpha);
    if (!row.law) continue;
    const auto& law = *row.law;
    doc.set("kappa", law.kappa);
    doc.set("theta", law.theta);
    doc.set("nu1", law.nu1);
    doc.set("nu2", law.nu2);
    doc.set("beta_x", law.beta_x);
    doc.set("beta_y", law.beta_y);
    doc.set("var_diag", law.var_diag);
    doc.set("var_off", law.var_off);
    if (law.multiplicity == 1) doc.set("sigma2", law.sigma2());
  }
  return doc;
}

CsvTable gamma_table(const ModelConfig& config, const McReport& report) {
  CsvTable t;
  t.meta["fingerprint"] = fingerprint_hex(config_fingerprint(config));
  t.meta["seed"] = std::to_string(config.seed);
  t.header = {"rep", "group", "index", "value"};
  for (std::size_t i = 0; i < report.rep_index.size(); ++i) {
    for (const auto& g : report.groups) {
      const auto k = group_number(config, g.law.alpha);
      const auto& v = g.gamma[i];
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        t.rows.push_back({std::to_string(report.rep_index[i]), std::to_string(k), std::to_string(j + 1),
                          format_double(v[j])});
      }
    }
  }
  return t;
}

CsvTable replication_table(const McReport& report) {
  CsvTable t;
  t.header = {"rep", "status", "bulk_contained"};
  std::vector<std::vector<std::string>> rows(report.reps_requested);
  for (std::size_t i = 0; i < report.rep_index.size(); ++i) {
    const std::string contained =
        report.bulk_contained.empty() ? "na" : std::to_string(report.bulk_contained[i]);
    rows[report.rep_index[i]] = {std::to_string(report.rep_index[i]), "ok", contained};
  }
  for (auto r : report.failed_reps) rows[r] = {std::to_string(r), "failed", "na"};
  t.rows = std::move(rows);
  return t;
}

KeyValueDocument summary_document(const ModelConfig& config, const McReport& report) {
  KeyValueDocument doc;
  doc.add_section("run");
  doc.set("fingerprint", fingerprint_hex(config_fingerprint(config)));
  doc.set_int("seed", config.seed);
  doc.set_int("reps_requested", report.reps_requested);
  doc.set_int("reps_ok", report.rep_index.size());
  doc.set_int("reps_failed", report.failed_reps.size());
  if (report.bulk) {
    doc.set("bulk_lower", report.bulk->lower);
    doc.set("bulk_upper", report.bulk->upper);
  }
  doc.set("bulk_containment_fraction", report.bulk_containment_fraction);
  if (!report.failed_reps.empty()) {
    doc.add_section("failures");
    for (std::size_t i = 0; i < report.failed_reps.size(); ++i) {
      std::string msg = report.failure_messages[i];
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      doc.set("rep." + std::to_string(report.failed_reps[i]), msg);
    }
  }
  for (const auto& g : report.groups) {
    doc.add_section(group_section(group_number(config, g.law.alpha)));
    doc.set("alpha", g.law.alpha);
    doc.set_int("multiplicity", g.law.multiplicity);
    doc.set_int("offset", g.offset);
    doc.set("psi_n", g.law.psi_n);
    doc.set("kappa", g.law.kappa);
    doc.set("var_diag", g.law.var_diag);
    doc.set("var_off", g.law.var_off);
    doc.set("sigma2", g.law.sigma2());
    doc.set("positioning_fraction", g.positioning_fraction);
    doc.set("variance_defined", std::string(g.variance_defined ? "true" : "false"));
    doc.set("ks_kind", std::string(g.law.multiplicity == 1 ? "one_sample_normal" : "two_sample_limit"));
    const auto m = g.mean.size();
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto s = std::to_string(j + 1);
      doc.set("mean." + s, g.mean[j]);
      doc.set("variance." + s, g.covariance(j, j));
      doc.set("ks_statistic." + s, g.ks[static_cast<std::size_t>(j)].statistic);
      doc.set("ks_p_value." + s, g.ks[static_cast<std::size_t>(j)].p_value);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        doc.set("covariance." + std::to_string(i + 1) + "." + std::to_string(j + 1), g.covariance(i, j));
      }
    }
  }
  return doc;
}

std::vector<PlotDataset> plot_datasets(const ModelConfig& config, const McReport& report,
                                       std::size_t limit_draws) {
  std::vector<PlotDataset> out;
  std::map<std::string, std::string> meta{{"fingerprint", fingerprint_hex(config_fingerprint(config))},
                                          {"seed", std::to_string(config.seed)}};
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    const auto& g = report.groups[i];
    const auto k = group_number(config, g.law.alpha);
    const auto tag = "group" + std::to_string(k);
    auto with_meta = [&](PlotDataset d) {
      d.meta = meta;
      d.meta["alpha"] = format_double(g.law.alpha);
      return d;
    };
    if (g.law.multiplicity == 1) {
      std::vector<double> v;
      for (const auto& x : g.gamma) v.push_back(x[0]);
      const double sd = std::sqrt(g.law.sigma2());
      out.push_back(with_meta(make_qq("qq_" + tag, v, sd)));
      if (v.size() >= 2) out.push_back(with_meta(make_density1d("density_" + tag, v, sd)));
      continue;
    }
    std::vector<double> ex, ey, tx, ty;
    for (const auto& x : g.gamma) {
      ex.push_back(x[0]);
      ey.push_back(x[1]);
    }
    for (const auto& d : sample_limit(g.law, limit_draws, child_seed(config.seed ^ 0x434f4e54ULL, i))) {
      tx.push_back(d[0]);
      ty.push_back(d[1]);
    }
    std::vector<double> px(ex), py(ey);
    px.insert(px.end(), tx.begin(), tx.end());
    py.insert(py.end(), ty.begin(), ty.end());
    std::sort(px.begin(), px.end());
    std::sort(py.begin(), py.end());
    const double lx = quantile_sorted(px, 0.005), hx = quantile_sorted(px, 0.995);
    const double ly = quantile_sorted(py, 0.005), hy = quantile_sorted(py, 0.995);
    if (!(hx > lx) || !(hy > ly)) continue;
    out.push_back(with_meta(make_contour2d("contour_" + tag + "_empirical", ex, ey, lx, hx, ly, hy, 30)));
    out.push_back(with_meta(make_contour2d("contour_" + tag + "_theory", tx, ty, lx, hx, ly, hy, 30)));
  }
  return out;
}

McReport report_from_tables(const ModelConfig& config, std::span<const CltLaw> laws,
                            const CsvTable& gamma, const CsvTable& replications,
                            const RunOptions& options) {
  McReport report;
  report.reps_requested = config.reps;
  const auto model = config.base_model();
  if (model.is_unit_atom()) report.bulk = wachter_support(model);
  const auto offsets = config.spikes.rank_offsets(config.p, model);

  const auto c_rep = replications.column("rep");
  const auto c_status = replications.column("status");
  const auto c_contained = replications.column("bulk_contained");
  std::map<std::size_t, std::size_t> slot_of;
  for (const auto& row : replications.rows) {
    const auto r = static_cast<std::size_t>(parse_uint(row[c_rep]));
    if (row[c_status] == "ok") {
      slot_of[r] = report.rep_index.size();
      report.rep_index.push_back(r);
      if (report.bulk) report.bulk_contained.push_back(static_cast<std::uint8_t>(parse_uint(row[c_contained])));
    } else {
      report.failed_reps.push_back(r);
      report.failure_messages.push_back("recorded as failed");
    }
  }

  std::map<std::size_t, std::size_t> law_of_group;
  report.groups.resize(laws.size());
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const auto k = group_number(config, laws[i].alpha);
    law_of_group[k] = i;
    report.groups[i].law = laws[i];
    report.groups[i].offset = offsets[k - 1];
    report.groups[i].gamma.assign(report.rep_index.size(),
                                  Eigen::VectorXd::Constant(static_cast<Eigen::Index>(laws[i].multiplicity),
                                                            std::nan("")));
  }
  const auto g_rep = gamma.column("rep");
  const auto g_group = gamma.column("group");
  const auto g_index = gamma.column("index");
  const auto g_value = gamma.column("value");
  for (const auto& row : gamma.rows) {
    const auto r = static_cast<std::size_t>(parse_uint(row[g_rep]));
    const auto k = static_cast<std::size_t>(parse_uint(row[g_group]));
    const auto j = static_cast<Eigen::Index>(parse_uint(row[g_index]));
    const auto slot = slot_of.find(r);
    const auto law = law_of_group.find(k);
    if (slot == slot_of.end() || law == law_of_group.end()) {
      throw Error(ErrorCode::kParse, "gamma row for unknown replication or group");
    }
    auto& v = report.groups[law->second].gamma[slot->second];
    if (j < 1 || j > v.size()) throw Error(ErrorCode::kParse, "gamma index out of range");
    v[j - 1] = parse_double(row[g_value]);
  }
  finalize_report(config, report, options);
  return report;
}

KeyValueDocument universality_document(const ModelConfig& a, const ModelConfig& b,
                                       const UniversalityReport& report) {
  KeyValueDocument doc;
  doc.add_section("probe");
  doc.set("fingerprint_a", fingerprint_hex(config_fingerprint(a)));
  doc.set("fingerprint_b", fingerprint_hex(config_fingerprint(b)));
  doc.set("dist_a", std::string(to_string(a.dist_x)) + "/" + std::string(to_string(a.dist_y)));
  doc.set("dist_b", std::string(to_string(b.dist_x)) + "/" + std::string(to_string(b.dist_y)));
  doc.set("lambda", report.lambda);
  doc.set_int("reps", report.reps);
  doc.set("level", report.level);
  doc.set("corrected_level", report.corrected_level);
  doc.set("max_asymmetry_a", report.a.max_asymmetry);
  doc.set("max_asymmetry_b", report.b.max_asymmetry);
  doc.set("verdict", std::string(report.pass ? "pass" : "fail"));
  for (const auto& e : report.entries) {
    doc.add_section("entry." + std::to_string(e.row + 1) + "." + std::to_string(e.col + 1));
    const auto va = entry_values(report.a, e.row, e.col);
    const auto vb = entry_values(report.b, e.row, e.col);
    doc.set("mean_a", mean(va));
    doc.set("mean_b", mean(vb));
    doc.set("variance_a", variance(va));
    doc.set("variance_b", variance(vb));
    doc.set("ks_statistic", e.ks.statistic);
    doc.set("ks_p_value", e.ks.p_value);
    doc.set("variance_ratio", e.variance_ratio.ratio);
    doc.set("variance_ratio_lower", e.variance_ratio.lower);
    doc.set("variance_ratio_upper", e.variance_ratio.upper);
    doc.set("variance_ratio_p_value", e.variance_ratio.p_value);
    doc.set("rejected", std::string(e.rejected ? "true" : "false"));
  }
  for (const auto& g : report.gammas) {
    doc.add_section("gamma." + std::to_string(group_number(a, g.alpha)) + "." + std::to_string(g.index + 1));
    doc.set("alpha", g.alpha);
    doc.set("ks_statistic", g.ks.statistic);
    doc.set("ks_p_value", g.ks.p_value);
    doc.set("variance_ratio", g.variance_ratio.ratio);
    doc.set("rejected", std::string(g.rejected ? "true" : "false"));
  }
  return doc;
}

CsvTable omega_table(const UniversalityReport& report) {
  CsvTable t;
  t.header = {"config", "rep", "row", "col", "value"};
  auto add = [&](const char* name, const OmegaCollection& c) {
    for (std::size_t i = 0; i < c.omegas.size(); ++i) {
      for (Eigen::Index r = 0; r < c.omegas[i].rows(); ++r) {
        for (Eigen::Index s = r; s < c.omegas[i].cols(); ++s) {
          t.rows.push_back({name, std::to_string(c.rep_index[i]), std::to_string(r + 1),
                            std::to_string(s + 1), format_double(c.omegas[i](r, s))});
        }
      }
    }
  };
  add("a", report.a);
  add("b", report.b);
  return t;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void write_derived(const std::filesystem::path& dir, const ModelConfig& config, const McReport& report) {
  write_text(dir / files::kSummary, summary_document(config, report).to_string());
  const auto plots = dir / files::kPlots;
  std::error_code ec;
  std::filesystem::remove_all(plots, ec);
  for (const auto& d : plot_datasets(config, report)) {
    d.validate();
    write_text(plots / (d.name + ".csv"), d.to_csv().to_string());
  }
}

}  // namespace

void write_simulation(const std::filesystem::path& dir, const ModelConfig& config,
                      const TheoryTable& table, const McReport& report) {
  write_text(dir / files::kConfig, canonical_config(config));
  write_text(dir / files::kTheory, theory_document(config, table).to_string());
  write_text(dir / files::kGamma, gamma_table(config, report).to_string());
  write_text(dir / files::kReplications, replication_table(report).to_string());
  write_derived(dir, config, report);
}

McReport rebuild_simulation(const std::filesystem::path& dir) {
  const auto config = load_config(dir / files::kConfig);
  const auto table = compute_theory(config);
  const auto laws = table.laws();
  const auto gamma = CsvTable::parse(read_text(dir / files::kGamma), (dir / files::kGamma).string());
  const auto reps =
      CsvTable::parse(read_text(dir / files::kReplications), (dir / files::kReplications).string());
  auto report = report_from_tables(config, laws, gamma, reps);
  write_derived(dir, config, report);
  return report;
}

}  // namespace fisherspike
