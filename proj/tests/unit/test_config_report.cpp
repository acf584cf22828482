// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "fisherspike/config.hpp"
#include "fisherspike/error.hpp"
#include "fisherspike/report.hpp"
#include "fisherspike/theory.hpp"

namespace fisherspike {
namespace {

constexpr const char* kText = R"(# sample
[model]
p = 30
n1 = 150
n2 = 60

[spikes]
values = 20, 0.2
multiplicities = 1, 2

[sigma]
case = case2
rho = 0.3

[dist]
x = rademacher
y = gaussian

[mc]
reps = 40
seed = 9
)";

std::string parse_error(std::string_view text) {
  try {
    parse_config(text, "cfg.ini");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  ADD_FAILURE() << "expected a parse error";
  return {};
}

TEST(Config, ParsesFields) {
  const auto c = parse_config(kText);
  EXPECT_EQ(c.p, 30u);
  EXPECT_EQ(c.n1, 150u);
  EXPECT_EQ(c.spikes.total(), 3u);
  EXPECT_EQ(c.sigma_case, SigmaCase::kCase2);
  EXPECT_DOUBLE_EQ(c.rho, 0.3);
  EXPECT_EQ(c.dist_x, SampleDistribution::kRademacher);
  EXPECT_EQ(c.dist_y, SampleDistribution::kGaussian);
  EXPECT_EQ(c.reps, 40u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.regime, Regime::kAssumptionD);
}

TEST(Config, LineDiagnostics) {
  EXPECT_NE(parse_error("[model]\np = 30\np = 31\n").find("cfg.ini:3: key 'p' repeats line 2"),
            std::string::npos);
  EXPECT_NE(parse_error("p = 3\n").find("cfg.ini:1:"), std::string::npos);
  EXPECT_NE(parse_error("[model]\np = 30\nn1 = 150\nn2 = 60\n[mc]\nreps = many\n").find("cfg.ini:6:"),
            std::string::npos);
  EXPECT_NE(parse_error("[model]\np = 30\nn1 = 150\nn2 = 60\n[colour]\n").find("cfg.ini:5: unknown section"),
            std::string::npos);
  EXPECT_NE(parse_error("[model]\np = 30\nn1 = 150\nn2 = 60\n[spikes]\nvalues = 2, 3\nmultiplicities = 1\n")
                .find("cfg.ini:7:"),
            std::string::npos);
  EXPECT_NE(parse_error("[model]\np = 30\nn1 = 150\nn2 = 20\n").find("n2 must exceed p"), std::string::npos);
  EXPECT_NE(parse_error("[model\n").find("cfg.ini:1: unterminated"), std::string::npos);
}

TEST(Config, CanonicalRoundTrip) {
  auto c = parse_config(kText);
  c.base_atoms = {{1.0, 0.7}, {2.5, 0.3}};
  c.truncation.eta_exponent = 0.1;
  c.rho = 0.1 + 0.2;  // not exactly representable in short decimal
  const auto text = canonical_config(c);
  const auto back = parse_config(text);
  EXPECT_EQ(canonical_config(back), text);
  EXPECT_EQ(back.rho, c.rho);
  EXPECT_EQ(config_fingerprint(back), config_fingerprint(c));
}

TEST(Config, FingerprintTracksContent) {
  const auto a = parse_config(kText);
  auto b = a;
  b.seed += 1;
  EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
  EXPECT_EQ(fingerprint_hex(0xabcULL), "0000000000000abc");
}

TEST(Config, NumberHelpers) {
  EXPECT_EQ(parse_double(format_double(0.1)), 0.1);
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::nan("")))));
  EXPECT_EQ(parse_double(format_double(-std::numeric_limits<double>::infinity())),
            -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double("1.5x"), Error);
  EXPECT_THROW(parse_uint("-3"), Error);
  EXPECT_EQ(parse_uint_list(" 1, 2 ,3"), (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(Csv, RoundTrip) {
  CsvTable t;
  t.meta = {{"seed", "1"}, {"fingerprint", "00ff"}};
  t.header = {"a", "b"};
  t.rows = {{"1", format_double(1.0 / 3.0)}, {"2", format_double(-2e-300)}};
  const auto text = t.to_string();
  const auto back = CsvTable::parse(text);
  EXPECT_EQ(back.to_string(), text);
  EXPECT_EQ(back.meta, t.meta);
  EXPECT_EQ(parse_double(back.rows[0][back.column("b")]), 1.0 / 3.0);
  EXPECT_THROW(CsvTable::parse("a,b\n1\n"), Error);
  EXPECT_THROW(back.column("c"), Error);
}

TEST(Plots, BuildersValidate) {
  std::vector<double> xs, ys;
  Engine e(1);
  for (int i = 0; i < 500; ++i) {
    xs.push_back(draw(SampleDistribution::kGaussian, e));
    ys.push_back(draw(SampleDistribution::kGaussian, e));
  }
  const auto qq = make_qq("qq", xs, 1.0);
  EXPECT_NO_THROW(qq.validate());
  const auto dens = make_density1d("d", xs, 1.0);
  EXPECT_NO_THROW(dens.validate());
  const auto cont = make_contour2d("c", xs, ys, -3, 3, -3, 3, 30);
  EXPECT_NO_THROW(cont.validate());
  EXPECT_EQ(cont.series[0].size(), 900u);

  auto broken = dens;
  broken.series[1][0] += 1.0;
  EXPECT_THROW(broken.validate(), Error);
  auto ragged = cont;
  ragged.series[2].pop_back();
  EXPECT_THROW(ragged.validate(), Error);

  const auto back = PlotDataset::from_csv(cont.to_csv());
  EXPECT_EQ(back.kind, PlotKind::kContour2d);
  EXPECT_EQ(back.series, cont.series);
}

TEST(Report, TablesRebuildTheSameReport) {
  auto c = parse_config(kText);
  c.dist_x = SampleDistribution::kGaussian;
  const auto table = compute_theory(c);
  const auto laws = table.laws();
  const auto report = run_mc(c, laws);
  const auto gamma = CsvTable::parse(gamma_table(c, report).to_string());
  const auto reps = CsvTable::parse(replication_table(report).to_string());
  const auto back = report_from_tables(c, laws, gamma, reps);
  ASSERT_EQ(back.groups.size(), report.groups.size());
  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    EXPECT_EQ(back.groups[g].covariance, report.groups[g].covariance);
    EXPECT_EQ(back.groups[g].mean, report.groups[g].mean);
    EXPECT_EQ(back.groups[g].ks[0].statistic, report.groups[g].ks[0].statistic);
  }
  EXPECT_EQ(back.bulk_containment_fraction, report.bulk_containment_fraction);
  EXPECT_EQ(summary_document(c, back).to_string(), summary_document(c, report).to_string());
}

TEST(Report, WriteAndRebuildDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "fisherspike_report_test";
  std::filesystem::remove_all(dir);
  auto c = parse_config(kText);
  const auto table = compute_theory(c);
  const auto report = run_mc(c, table.laws());
  write_simulation(dir, c, table, report);
  const auto summary = read_text(dir / files::kSummary);
  const auto contour = read_text(dir / files::kPlots / "contour_group2_empirical.csv");
  std::filesystem::remove_all(dir / files::kPlots);
  std::filesystem::remove(dir / files::kSummary);
  rebuild_simulation(dir);
  EXPECT_EQ(read_text(dir / files::kSummary), summary);
  EXPECT_EQ(read_text(dir / files::kPlots / "contour_group2_empirical.csv"), contour);
  EXPECT_TRUE(std::filesystem::exists(dir / files::kPlots / "qq_group1.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Report, MissingFileIsAnIoError) {
  try {
    load_config("/nonexistent/fisherspike.ini");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace fisherspike
