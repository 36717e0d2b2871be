// Command-line front end: data generation, tomography, training, and the
// experiment sweeps that write CSV and SVG artifacts.
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "seisloc/experiments.hpp"
#include "seisloc/plot.hpp"
#include "seisloc/workflow_demo.hpp"

using namespace seisloc;

namespace {

struct FieldOptions {
  int grid = 20;
  double width_km = 1.0;

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "Cells per side (N = grid^2)")->capture_default_str();
    app->add_option("--width-km", width_km, "Side length of the square field")->capture_default_str();
  }
  FieldConfig field() const { return FieldConfig{width_km, width_km, grid, grid}; }
};

std::string default_out_dir() {
  const char* env = std::getenv("SEISLOC_OUT_DIR");
  return env && *env ? env : ".";
}

std::string in_out_dir(const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return (std::filesystem::path(dir) / name).string();
}

void add_mlp_options(CLI::App* app, MlpHyper& h) {
  app->add_option("--mlp-hidden", h.hidden, "Hidden layer widths")->delimiter(',')->capture_default_str();
  app->add_option("--mlp-dropout", h.dropout)->capture_default_str();
  app->add_option("--mlp-batch", h.batch)->capture_default_str();
  app->add_option("--mlp-lr", h.learning_rate)->capture_default_str();
  app->add_option("--mlp-epochs", h.epochs)->capture_default_str();
  app->add_option("--mlp-patience", h.patience, "Early-stop patience in epochs (0 disables)")->capture_default_str();
}

void add_svm_options(CLI::App* app, SvmGrid& g) {
  app->add_option("--svm-C", g.c_values, "Penalty grid")->delimiter(',');
  app->add_option("--svm-gamma", g.gamma_values, "Kernel width grid")->delimiter(',');
  app->add_option("--svm-folds", g.folds)->capture_default_str();
  app->add_option("--svm-cv-max", g.cv_max_samples, "Cross-validation subsample cap")->capture_default_str();
}

void add_augment_options(CLI::App* app, AugmentConfig& a) {
  app->add_option("--aug-initial-x", a.initial_x, "Initial augmented volume (0: 100 per cell)")->capture_default_str();
  app->add_option("--aug-factor", a.factor)->capture_default_str();
  app->add_option("--aug-threshold", a.threshold_points, "Saturation threshold in accuracy points")
      ->capture_default_str();
  app->add_option("--aug-max-rounds", a.max_rounds)->capture_default_str();
  app->add_flag("--aug-inject-noise", a.inject_noise, "Add measurement noise to augmented fingerprints");
}

void add_de_options(CLI::App* app, DeConfig& d) {
  app->add_option("--de-population", d.population)->capture_default_str();
  app->add_option("--de-F", d.f)->capture_default_str();
  app->add_option("--de-CR", d.cr)->capture_default_str();
  app->add_option("--de-generations", d.max_generations)->capture_default_str();
  app->add_option("--de-patience", d.patience)->capture_default_str();
  app->add_option("--de-seed", d.seed)->capture_default_str();
  app->add_flag("!--de-containing-cell", d.refine_cell, "Report the cell containing the best point");
}

void add_experiment_options(CLI::App* app, ExperimentConfig& c, std::vector<std::string>& classifiers) {
  app->add_option("--grid", c.grid)->capture_default_str();
  app->add_option("--width-km", c.width_km)->capture_default_str();
  app->add_option("--sigma-km", c.sigma_km, "Spread of real event sources")->capture_default_str();
  app->add_option("--xi", c.xi, "Noise level")->capture_default_str();
  app->add_option("--test-events", c.test_events)->capture_default_str();
  app->add_option("--L", c.l_values, "Real-sample sweep")->delimiter(',');
  app->add_option("--phyaug-L", c.phyaug_l_values, "Real-sample sweep for the PhyAug arm")->delimiter(',');
  app->add_option("--seeds", c.seeds)->capture_default_str();
  app->add_option("--base-seed", c.base_seed)->capture_default_str();
  app->add_option("--classifiers", classifiers, "mlp, svm")->delimiter(',');
  app->add_option("--phyaug-mlp-epochs", c.phyaug_mlp_epochs)->capture_default_str();
  app->add_option("--levels", c.levels, "Absolute accuracy levels for the ratio")->delimiter(',');
  app->add_option("--relative-levels", c.relative_levels, "Levels as fractions of the best baseline accuracy")
      ->delimiter(',');
  app->add_option("--xi-values", c.xi_values)->delimiter(',');
  app->add_option("--baseline-L", c.baseline_l)->capture_default_str();
  app->add_option("--bench-grids", c.bench_grids, "Cells per side for the timing sweep")->delimiter(',');
  app->add_option("--bench-events", c.bench_events)->capture_default_str();
  app->add_option("--bench-tomo-events", c.bench_tomo_events)->capture_default_str();
  app->add_option("--bench-train-per-cell", c.bench_train_per_cell)->capture_default_str();
  app->add_option("--bench-mlp-epochs", c.bench_mlp_epochs)->capture_default_str();
  app->add_option("--bench-svm-C", c.bench_svm_c)->capture_default_str();
  app->add_option("--bench-svm-gamma", c.bench_svm_gamma)->capture_default_str();
  app->add_option("--threads", c.threads)->capture_default_str();
  app->add_option("--out-dir", c.out_dir, "Output directory (default $SEISLOC_OUT_DIR or .)");
  app->add_flag("-v,--verbose", c.verbose, "Print one progress line per trial on stderr");
  add_mlp_options(app, c.mlp);
  add_svm_options(app, c.svm);
  add_augment_options(app, c.augment);
  add_de_options(app, c.de);
}

void finish_experiment(ExperimentConfig& c, const std::vector<std::string>& classifiers) {
  if (!classifiers.empty()) {
    c.classifiers.clear();
    for (const auto& s : classifiers) c.classifiers.push_back(parse_classifier_kind(s));
  }
}

SensorArray sensors_for(const FieldConfig& f) { return place_boundary_sensors(f); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seismic source localization with physics-directed data augmentation"};
  app.set_config("--config", "", "Read options from a key = value file with one section per command");
  app.require_subcommand(1);
  const std::string out_default = default_out_dir();

  // gen-field
  FieldOptions gf_field;
  WavyBarrierParams gf_params;
  std::string gf_out;
  auto* gen_field = app.add_subcommand("gen-field", "Write the synthetic slowness field");
  gf_field.add(gen_field);
  gen_field->add_option("--base", gf_params.base)->capture_default_str();
  gen_field->add_option("--amplitude", gf_params.amplitude)->capture_default_str();
  gen_field->add_option("--waves", gf_params.waves)->capture_default_str();
  gen_field->add_flag("!--no-barrier", gf_params.barrier, "Omit the slow horizontal band");
  gen_field->add_option("--barrier-slowness", gf_params.barrier_slowness)->capture_default_str();
  gen_field->add_option("--out", gf_out, "Output path (default <out-dir>/slowness.txt)");

  // simulate
  FieldOptions sim_field;
  std::string sim_slowness, sim_out, sim_times_out, sim_dist = "gaussian";
  int sim_events = 1000;
  double sim_sigma = 0.2, sim_xi = 0.02;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Simulate events and write TDoA samples");
  sim_field.add(simulate);
  simulate->add_option("--slowness", sim_slowness, "Slowness file (default: synthetic field)");
  simulate->add_option("--events", sim_events)->capture_default_str();
  simulate->add_option("--distribution", sim_dist, "gaussian or uniform")->capture_default_str();
  simulate->add_option("--sigma-km", sim_sigma)->capture_default_str();
  simulate->add_option("--xi", sim_xi)->capture_default_str();
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--out", sim_out, "Dataset CSV (default <out-dir>/dataset.csv)");
  simulate->add_option("--times-out", sim_times_out, "Also write absolute arrival times for tomography");

  // tomo
  std::string tomo_times, tomo_out, tomo_truth, tomo_solver = "auto";
  FieldOptions tomo_field;
  TomoPrior tomo_prior;
  double tomo_xi = -1.0;
  bool tomo_prior_set = false;
  auto* tomo = app.add_subcommand("tomo", "Estimate slowness from arrival times");
  tomo_field.add(tomo);
  tomo->add_option("--times", tomo_times, "Arrival-time CSV from simulate --times-out")->required();
  tomo->add_option("--eta", tomo_prior.eta, "Regularization weight (ignored when --xi is given)");
  tomo->add_option("--xi", tomo_xi, "Noise level used to set eta");
  auto* smooth = tomo->add_option("--smoothness-km", tomo_prior.smoothness_km, "Prior length scale (default 2 cells)");
  tomo->add_option("--sigma-s", tomo_prior.sigma_s)->capture_default_str();
  tomo->add_option("--clamp-min", tomo_prior.clamp_min)->capture_default_str();
  tomo->add_option("--solver", tomo_solver, "auto, direct or cg")->capture_default_str();
  tomo->add_option("--truth", tomo_truth, "Ground-truth slowness file; prints the relative error");
  tomo->add_option("--out", tomo_out, "Output path (default <out-dir>/slowness_hat.txt)");

  // train
  FieldOptions tr_field;
  std::string tr_data, tr_out, tr_kind = "mlp";
  MlpHyper tr_mlp;
  SvmGrid tr_svm = SvmGrid::defaults();
  std::uint64_t tr_seed = 1;
  auto* train = app.add_subcommand("train", "Train a classifier on a dataset CSV");
  tr_field.add(train);
  train->add_option("--data", tr_data)->required();
  train->add_option("--classifier", tr_kind, "mlp or svm")->capture_default_str();
  train->add_option("--seed", tr_seed)->capture_default_str();
  train->add_option("--out", tr_out, "Model path (default <out-dir>/model.txt)");
  add_mlp_options(train, tr_mlp);
  add_svm_options(train, tr_svm);

  // augment
  FieldOptions au_field;
  std::string au_slowness, au_out, au_real, au_model_out, au_kind = "mlp";
  std::size_t au_count = 0;
  double au_xi = 0.02;
  std::uint64_t au_seed = 1;
  AugmentConfig au_cfg;
  MlpHyper au_mlp;
  SvmGrid au_svm = SvmGrid::defaults();
  auto* augment = app.add_subcommand("augment", "Generate augmented samples, or run the doubling schedule");
  au_field.add(augment);
  augment->add_option("--slowness", au_slowness, "Estimated slowness file")->required();
  augment->add_option("--count", au_count, "Samples to generate (default 100 per cell)");
  augment->add_option("--xi", au_xi)->capture_default_str();
  augment->add_option("--seed", au_seed)->capture_default_str();
  augment->add_option("--out", au_out, "Dataset CSV (default <out-dir>/augmented.csv)");
  augment->add_option("--real", au_real, "Real training CSV; runs the schedule and writes a model");
  augment->add_option("--classifier", au_kind)->capture_default_str();
  augment->add_option("--model-out", au_model_out, "Model path for the schedule (default <out-dir>/model.txt)");
  add_augment_options(augment, au_cfg);
  add_mlp_options(augment, au_mlp);
  add_svm_options(augment, au_svm);

  // evaluate
  FieldOptions ev_field;
  std::string ev_model, ev_data;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Grid-wise accuracy of a model on a dataset");
  ev_field.add(evaluate_cmd);
  evaluate_cmd->add_option("--model", ev_model)->required();
  evaluate_cmd->add_option("--data", ev_data)->required();

  // de-localize
  FieldOptions de_field;
  std::string de_slowness, de_data, de_out;
  DeConfig de_cfg;
  auto* de_cmd = app.add_subcommand("de-localize", "Localize dataset events by differential evolution");
  de_field.add(de_cmd);
  de_cmd->add_option("--slowness", de_slowness, "Slowness model used for the cost")->required();
  de_cmd->add_option("--data", de_data)->required();
  de_cmd->add_option("--out", de_out, "Result CSV (default <out-dir>/de_localize.csv)");
  add_de_options(de_cmd, de_cfg);

  // experiments
  ExperimentConfig x_fig9, x_ratio, x_noise, x_bench;
  std::vector<std::string> k_fig9, k_ratio, k_noise, k_bench;
  std::string ratio_input;
  for (auto* c : {&x_fig9, &x_ratio, &x_noise, &x_bench}) c->out_dir = out_default;
  auto* fig9 = app.add_subcommand("fig9", "Accuracy vs real-sample volume -> accuracy_vs_L.csv");
  add_experiment_options(fig9, x_fig9, k_fig9);
  auto* ratio = app.add_subcommand("ratio", "Real-data ratio at matched accuracy -> ratio_vs_accuracy.csv");
  add_experiment_options(ratio, x_ratio, k_ratio);
  ratio->add_option("--input", ratio_input, "Reuse an accuracy_vs_L.csv instead of rerunning the sweep");
  auto* noise = app.add_subcommand("noise-sweep", "Accuracy and data ratio vs noise level -> noise_sweep.csv");
  add_experiment_options(noise, x_noise, k_noise);
  auto* bench = app.add_subcommand("de-bench", "DE vs classifier time and error -> de_bench.csv");
  add_experiment_options(bench, x_bench, k_bench);

  // demo-polynomial
  DemoConfig demo_cfg;
  bool demo_identity = false;
  std::string demo_out, demo_dir = default_out_dir();
  auto* demo = app.add_subcommand("demo-polynomial", "Two-class polynomial-transform workflow demo");
  demo->add_option("--seed", demo_cfg.seed)->capture_default_str();
  demo->add_option("--pairs", demo_cfg.pairs)->capture_default_str();
  demo->add_option("--train-per-class", demo_cfg.train_per_class)->capture_default_str();
  demo->add_option("--test-per-class", demo_cfg.test_per_class)->capture_default_str();
  demo->add_flag("--identity", demo_identity, "Use the identity as the hidden transform");
  demo->add_option("--out", demo_out, "CSV path (default <out-dir>/demo_polynomial.csv)");
  demo->add_option("--out-dir", demo_dir, "Output directory (default $SEISLOC_OUT_DIR or .)");

  // plot
  std::string plot_csv, plot_out;
  PlotSpec plot_spec;
  std::vector<std::string> plot_series;
  bool plot_log_x = false, plot_log_y = false, plot_linear = false;
  auto* plot = app.add_subcommand("plot", "Render an experiment CSV as an SVG line chart");
  plot->add_option("csv", plot_csv, "Input CSV")->required();
  plot->add_option("--x", plot_spec.x, "X column (default by schema)");
  plot->add_option("--y", plot_spec.y, "Y column (default by schema)");
  plot->add_option("--series", plot_series, "Columns that identify a series")->delimiter(',');
  plot->add_option("--title", plot_spec.title);
  plot->add_flag("--log-x", plot_log_x);
  plot->add_flag("--log-y", plot_log_y);
  plot->add_flag("--linear", plot_linear, "Use linear axes regardless of the schema default");
  plot->add_option("--out", plot_out, "SVG path (default: CSV path with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_field) {
      const auto s = build_synthetic_slowness(gf_field.field(), gf_params);
      const auto path = gf_out.empty() ? in_out_dir(out_default, "slowness.txt") : gf_out;
      save_slowness(path, s);
      std::cout << path << '\n';
    } else if (*simulate) {
      const auto field = sim_field.field();
      const auto s = sim_slowness.empty() ? build_synthetic_slowness(field, {}) : load_slowness(sim_slowness);
      if (!(s.config() == field)) throw ConfigError("slowness file does not match --grid/--width-km");
      Rng rng(sim_seed);
      std::vector<Point> sources;
      if (sim_dist == "gaussian") {
        sources = sample_real_events(sim_events, field, sim_sigma, rng);
      } else if (sim_dist == "uniform") {
        sources = sample_uniform_events(sim_events, field, rng);
      } else {
        throw ParameterError("unknown distribution '" + sim_dist + "'");
      }
      const auto sensors = sensors_for(field);
      const auto events = simulate_events(sources, s, sensors, NoiseSpec{sim_xi, sim_seed}, rng);
      const auto path = sim_out.empty() ? in_out_dir(out_default, "dataset.csv") : sim_out;
      save_dataset(path, dataset_from_events(events, sensors, field, Provenance::real));
      std::cout << path << '\n';
      if (!sim_times_out.empty()) {
        CsvTable t{{"src_x", "src_y"}, {}};
        for (int k = 1; k <= sensors.size(); ++k) t.header.push_back("t" + std::to_string(k));
        for (const auto& e : events) {
          std::vector<std::string> row{format_number(e.source.x), format_number(e.source.y)};
          for (double v : e.times) row.push_back(format_number(v));
          t.add(std::move(row));
        }
        write_csv(sim_times_out, t);
        std::cout << sim_times_out << '\n';
      }
    } else if (*tomo) {
      const auto field = tomo_field.field();
      const auto sensors = sensors_for(field);
      const auto table = read_csv(tomo_times);
      const auto cx = table.column("src_x"), cy = table.column("src_y");
      std::vector<EventRecord> events;
      for (const auto& r : table.rows) {
        EventRecord e;
        e.source = {parse_number<double>(r[cx]), parse_number<double>(r[cy])};
        e.rays = assemble_event_matrix(e.source, sensors, field);
        for (int k = 1; k <= sensors.size(); ++k) e.times.push_back(parse_number<double>(r[table.column("t" + std::to_string(k))]));
        events.push_back(std::move(e));
      }
      const auto input = TomoInput::from_events(events, field);
      TomoPrior prior = tomo_prior;
      if (smooth->count() == 0) prior.smoothness_km = TomoPrior::for_field(field).smoothness_km;
      if (tomo_xi >= 0.0) prior.eta = TomoPrior::eta_for_noise(tomo_xi * input.mean_time(), prior.sigma_s);
      (void)tomo_prior_set;
      TomoSolver solver = TomoSolver::automatic;
      if (tomo_solver == "direct") solver = TomoSolver::direct;
      else if (tomo_solver == "cg") solver = TomoSolver::conjugate_gradient;
      else if (tomo_solver != "auto") throw ParameterError("unknown solver '" + tomo_solver + "'");
      const auto s_hat = estimate_slowness(input, prior, solver);
      const auto path = tomo_out.empty() ? in_out_dir(out_default, "slowness_hat.txt") : tomo_out;
      save_slowness(path, s_hat);
      std::cout << path << '\n';
      if (!tomo_truth.empty()) std::cout << "relative_error," << format_number(relative_error(s_hat, load_slowness(tomo_truth))) << '\n';
    } else if (*train) {
      const auto data = load_dataset(tr_data, tr_field.field());
      Rng rng(tr_seed);
      const auto kind = parse_classifier_kind(tr_kind);
      const Trainer trainer = kind == ClassifierKind::mlp ? mlp_trainer(tr_mlp) : svm_trainer(tr_svm);
      const auto model = trainer(data, nullptr, rng);
      const auto path = tr_out.empty() ? in_out_dir(out_default, "model.txt") : tr_out;
      save_classifier(path, model);
      std::cout << path << '\n';
    } else if (*augment) {
      const auto field = au_field.field();
      const auto s_hat = load_slowness(au_slowness);
      if (!(s_hat.config() == field)) throw ConfigError("slowness file does not match --grid/--width-km");
      const auto sensors = sensors_for(field);
      Rng rng(au_seed);
      if (au_real.empty()) {
        const std::size_t count = au_count ? au_count : 100 * static_cast<std::size_t>(field.cells());
        const auto d = generate_augmented(s_hat, count, sensors, NoiseSpec{au_xi, au_seed}, rng, au_cfg.inject_noise);
        const auto path = au_out.empty() ? in_out_dir(out_default, "augmented.csv") : au_out;
        save_dataset(path, d);
        std::cout << path << '\n';
      } else {
        const auto real = load_dataset(au_real, field);
        const auto kind = parse_classifier_kind(au_kind);
        const Trainer trainer = kind == ClassifierKind::mlp ? mlp_trainer(au_mlp) : svm_trainer(au_svm);
        if (au_count) au_cfg.initial_x = au_count;
        const auto r = augmentation_schedule(s_hat, real, sensors, trainer, au_cfg, NoiseSpec{au_xi, au_seed}, rng);
        const auto path = au_model_out.empty() ? in_out_dir(out_default, "model.txt") : au_model_out;
        save_classifier(path, r.model);
        std::cout << "round,X,validation_accuracy\n";
        for (std::size_t k = 0; k < r.x_trace.size(); ++k) {
          std::cout << k << ',' << r.x_trace[k] << ',' << format_number(r.accuracy_trace[k]) << '\n';
        }
        std::cout << path << '\n';
      }
    } else if (*evaluate_cmd) {
      const auto model = load_classifier(ev_model);
      const auto data = load_dataset(ev_data, ev_field.field());
      std::cout << "accuracy\n" << format_number(evaluate(model, data)) << '\n';
    } else if (*de_cmd) {
      const auto field = de_field.field();
      const auto s_hat = load_slowness(de_slowness);
      if (!(s_hat.config() == field)) throw ConfigError("slowness file does not match --grid/--width-km");
      const auto data = load_dataset(de_data, field);
      const auto sensors = sensors_for(field);
      CsvTable t{{"index", "x", "y", "cell", "cost", "true_cell", "error_km"}, {}};
      for (std::size_t i = 0; i < data.size(); ++i) {
        DeConfig cfg = de_cfg;
        cfg.seed = de_cfg.seed + i;
        const auto r = de_localize(data.samples[i].feature, s_hat, sensors, cfg);
        t.add({std::to_string(i), format_number(r.point.x), format_number(r.point.y), std::to_string(r.cell),
               format_number(r.cost), std::to_string(data.samples[i].label),
               format_number(localization_error(r.cell, data.samples[i].source, field))});
      }
      const auto path = de_out.empty() ? in_out_dir(out_default, "de_localize.csv") : de_out;
      write_csv(path, t);
      std::cout << path << '\n';
    } else if (*fig9) {
      finish_experiment(x_fig9, k_fig9);
      std::cout << emit_csv(x_fig9, "accuracy_vs_L.csv", cmd_fig9(x_fig9)) << '\n';
    } else if (*ratio) {
      finish_experiment(x_ratio, k_ratio);
      if (ratio_input.empty()) {
        const auto sweep = cmd_fig9(x_ratio);
        std::cout << emit_csv(x_ratio, "accuracy_vs_L.csv", sweep) << '\n';
        std::cout << emit_csv(x_ratio, "ratio_vs_accuracy.csv", cmd_ratio(x_ratio, &sweep)) << '\n';
      } else {
        const auto sweep = read_csv(ratio_input);
        std::cout << emit_csv(x_ratio, "ratio_vs_accuracy.csv", cmd_ratio(x_ratio, &sweep)) << '\n';
      }
    } else if (*noise) {
      finish_experiment(x_noise, k_noise);
      std::cout << emit_csv(x_noise, "noise_sweep.csv", cmd_noise_sweep(x_noise)) << '\n';
    } else if (*bench) {
      finish_experiment(x_bench, k_bench);
      std::cout << emit_csv(x_bench, "de_bench.csv", cmd_de_bench(x_bench)) << '\n';
    } else if (*demo) {
      if (demo_identity) demo_cfg.hidden = PolyTransform::identity();
      const auto r = demo_pipeline(demo_cfg);
      CsvTable t{{"seed", "source_acc_on_target", "phyaug_acc_on_target"}, {}};
      t.add({std::to_string(demo_cfg.seed), format_number(r.source_acc_on_target), format_number(r.phyaug_acc_on_target)});
      const auto path = demo_out.empty() ? in_out_dir(demo_dir, "demo_polynomial.csv") : demo_out;
      write_csv(path, t);
      std::cout << t.str();
    } else if (*plot) {
      const auto table = read_csv(plot_csv);
      PlotSpec spec = default_plot_spec(table);
      if (!plot_spec.x.empty()) spec.x = plot_spec.x;
      if (!plot_spec.y.empty()) spec.y = plot_spec.y;
      if (!plot_series.empty()) spec.series = plot_series;
      if (!plot_spec.title.empty()) spec.title = plot_spec.title;
      if (plot_linear) spec.log_x = spec.log_y = false;
      spec.log_x = spec.log_x || plot_log_x;
      spec.log_y = spec.log_y || plot_log_y;
      const auto path = plot_out.empty() ? std::filesystem::path(plot_csv).replace_extension(".svg").string() : plot_out;
      write_text(path, render_svg(table, spec));
      std::cout << path << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "seisloc: error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "seisloc: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
