#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "seisloc/experiments.hpp"
#include "seisloc/plot.hpp"

using namespace seisloc;

namespace {

CsvTable table(const std::string& text) {
  std::istringstream is(text);
  return parse_csv(is);
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.grid = 4;
  c.test_events = 40;
  c.l_values = {16, 32};
  c.seeds = 1;
  c.classifiers = {ClassifierKind::mlp};
  c.mlp.hidden = {16};
  c.mlp.epochs = 5;
  c.augment.initial_x = 64;
  c.augment.max_rounds = 1;
  c.xi_values = {0.0, 0.04};
  c.baseline_l = 32;
  c.bench_grids = {3, 4};
  c.bench_events = 5;
  c.bench_tomo_events = 40;
  c.bench_train_per_cell = 4;
  c.bench_mlp_epochs = 3;
  c.de.population = 10;
  c.de.max_generations = 20;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(Csv, RoundTripAndMissingColumn) {
  const auto t = table("a,b\n1,2\n3,4\n");
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.str(), "a,b\n1,2\n3,4\n");
  EXPECT_EQ(t.column("b"), 1u);
  try {
    (void)t.column("zz");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("'zz'"), std::string::npos);
  }
  EXPECT_THROW(table("a,b\n1\n"), FormatError);
  CsvTable w{{"a"}, {}};
  EXPECT_THROW(w.add({"1", "2"}), ArityError);
}

TEST(Plot, EmptySeriesDrawsAxesOnly) {
  const auto svg = render_svg(table("classifier,phyaug,L,seed,accuracy\n"), default_plot_spec(table("L,classifier,phyaug,accuracy\n")));
  EXPECT_EQ(count(svg, "<polyline"), 0u);
  EXPECT_GE(count(svg, "<line"), 2u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, TwoPointsGiveOnePolylineWithTwoVertices) {
  const auto t = table("classifier,phyaug,L,seed,accuracy\nmlp,0,25,1,0.5\nmlp,0,50,1,0.6\n");
  const auto svg = render_svg(t, default_plot_spec(t));
  ASSERT_EQ(count(svg, "<polyline"), 1u);
  const auto start = svg.find("points=\"", svg.find("<polyline")) + 8;
  const auto points = svg.substr(start, svg.find('"', start) - start);
  EXPECT_EQ(count(points, ","), 2u);
  EXPECT_EQ(count(points, " "), 1u);
}

TEST(Plot, SeriesAreAveragedOverSeeds) {
  const auto t = table("classifier,phyaug,L,seed,accuracy\nmlp,0,25,1,0.4\nmlp,0,25,2,0.6\nmlp,1,25,1,0.9\n"
                       "mlp,1,50,1,0.95\nmlp,0,50,1,0.7\n");
  const auto svg = render_svg(t, default_plot_spec(t));
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("classifier=mlp phyaug=0"), std::string::npos);
}

TEST(Plot, SameCsvGivesIdenticalSvg) {
  const std::string text = "N,method,mean_time_s,mean_error_km,events\n100,de,0.03,0.05,100\n400,de,0.06,0.04,100\n"
                           "100,mlp,0.0001,0.05,100\n400,mlp,0.0002,0.04,100\n";
  EXPECT_EQ(render_svg(table(text), default_plot_spec(table(text))), render_svg(table(text), default_plot_spec(table(text))));
}

TEST(Plot, SchemaDetectionAndMissingColumn) {
  EXPECT_EQ(default_plot_spec(table("classifier,accuracy,L_without,L_with,ratio,status\n")).y, "ratio");
  EXPECT_EQ(default_plot_spec(table("xi,classifier,phyaug,seed,L,accuracy,ratio,status\n")).x, "xi");
  EXPECT_EQ(default_plot_spec(table("N,method,mean_time_s,mean_error_km,events\n")).y, "mean_time_s");
  EXPECT_EQ(default_plot_spec(table("classifier,phyaug,L,seed,accuracy\n")).x, "L");
  EXPECT_THROW(default_plot_spec(table("foo,bar\n")), FormatError);
  const auto t = table("classifier,phyaug,L,seed\nmlp,0,25,1\n");
  try {
    (void)render_svg(t, default_plot_spec(t));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("'accuracy'"), std::string::npos);
  }
}

TEST(Plot, NonNumericAndNonPositiveLogValuesAreSkipped) {
  const auto t = table("classifier,accuracy,L_without,L_with,ratio,status\nmlp,0.5,NA,25,NA,unreachable_without\n"
                       "mlp,0.6,800,25,0.03125,ok\n");
  const auto svg = render_svg(t, default_plot_spec(t));
  EXPECT_EQ(count(svg, "<polyline"), 1u);
}

TEST(Ratio, MinimumReachingLevel) {
  const std::vector<std::pair<int, double>> curve{{25, 0.2}, {50, 0.4}, {100, 0.6}, {200, 0.8}};
  EXPECT_EQ(min_l_reaching(curve, 0.1), 25);
  EXPECT_EQ(min_l_reaching(curve, 0.4), 50);
  EXPECT_EQ(min_l_reaching(curve, 0.41), 100);
  EXPECT_EQ(min_l_reaching(curve, 0.8), 200);
  EXPECT_FALSE(min_l_reaching(curve, 0.81));
  EXPECT_FALSE(min_l_reaching({}, 0.0));
}

TEST(Ratio, DominatingCurveAndSentinels) {
  const auto sweep = table(
      "classifier,phyaug,L,seed,accuracy\n"
      "mlp,0,100,1,0.2\nmlp,0,200,1,0.4\nmlp,0,400,1,0.6\nmlp,0,800,1,0.8\n"
      "mlp,1,100,1,0.5\nmlp,1,200,1,0.7\nmlp,1,400,1,0.75\nmlp,1,800,1,0.78\n");
  ExperimentConfig cfg;
  cfg.levels = {0.2, 0.6, 0.8, 0.9};
  const auto r = ratio_from_sweep(sweep, cfg);
  ASSERT_EQ(r.rows.size(), 4u);
  const auto cr = r.column("ratio"), cs = r.column("status"), cw = r.column("L_with");
  EXPECT_EQ(r.rows[0][cr], "1");
  EXPECT_DOUBLE_EQ(parse_number<double>(r.rows[1][cr]), 0.5);
  EXPECT_EQ(r.rows[2][cs], "unreachable_with");
  EXPECT_EQ(r.rows[2][cw], "NA");
  EXPECT_EQ(r.rows[2][cr], "NA");
  EXPECT_EQ(r.rows[3][cs], "unreachable");
  for (const auto& row : r.rows) {
    if (row[cs] == "ok") {
      EXPECT_LE(parse_number<double>(row[cr]), 1.0);
    }
  }
}

TEST(Ratio, RelativeLevelsFollowTheBestBaseline) {
  const auto sweep = table("classifier,phyaug,L,seed,accuracy\nsvm,0,100,1,0.4\nsvm,0,100,2,0.6\nsvm,1,100,1,0.45\n");
  ExperimentConfig cfg;
  cfg.relative_levels = {0.5, 1.0};
  const auto r = ratio_from_sweep(sweep, cfg);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(parse_number<double>(r.rows[0][r.column("accuracy")]), 0.25);
  EXPECT_EQ(r.rows[1][r.column("status")], "unreachable_with");
}

TEST(Experiments, LogLogSlope) {
  EXPECT_NEAR(loglog_slope({100, 400, 900, 2500}, {1, 2, 3, 5}), 0.5, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), ArityError);
}

TEST(Experiments, ParallelMapKeepsIndexOrder) {
  const auto r = parallel_map(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw NumericalError("boom");
                              return 0;
                            }),
               NumericalError);
}

TEST(Experiments, ConfigValidation) {
  auto c = tiny();
  c.l_values.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny();
  c.seeds = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny();
  c.classifiers.clear();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Experiments, MinimalSweepHasFourRowsAndIgnoresThreadCount) {
  auto c = tiny();
  const auto a = cmd_fig9(c);
  EXPECT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.header, (std::vector<std::string>{"classifier", "phyaug", "L", "seed", "accuracy"}));
  for (const auto& r : a.rows) {
    const double acc = parse_number<double>(r[4]);
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
  c.threads = 3;
  EXPECT_EQ(cmd_fig9(c).str(), a.str());
}

TEST(Experiments, NoiseSweepRows) {
  const auto c = tiny();
  const auto t = cmd_noise_sweep(c);
  EXPECT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][t.column("phyaug")], "0");
  EXPECT_EQ(t.rows[0][t.column("ratio")], "1");
  EXPECT_EQ(cmd_noise_sweep(c).str(), t.str());
}

TEST(Experiments, DeBenchRows) {
  auto c = tiny();
  c.classifiers = {ClassifierKind::svm, ClassifierKind::mlp};
  const auto t = cmd_de_bench(c);
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.rows[1][t.column("method")], "svm");
  EXPECT_EQ(t.rows[0][t.column("N")], "9");
  EXPECT_EQ(t.rows[0][t.column("method")], "de");
  EXPECT_EQ(t.rows[5][t.column("method")], "mlp");
  // Errors are deterministic; times are not.
  const auto u = cmd_de_bench(c);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.rows[i][t.column("mean_error_km")], u.rows[i][u.column("mean_error_km")]);
  }
  c.classifiers = {ClassifierKind::mlp};
  EXPECT_EQ(cmd_de_bench(c).rows.size(), 4u);
}

TEST(Experiments, EmitCsvCreatesDirectory) {
  auto c = tiny();
  c.out_dir = (std::filesystem::temp_directory_path() / "seisloc_emit_test" / "nested").string();
  std::filesystem::remove_all(std::filesystem::path(c.out_dir).parent_path());
  CsvTable t{{"a"}, {{"1"}}};
  const auto path = emit_csv(c, "x.csv", t);
  EXPECT_EQ(read_csv(path).str(), "a\n1\n");
  std::filesystem::remove_all(std::filesystem::path(c.out_dir).parent_path());
}
