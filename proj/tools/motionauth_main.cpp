// motionauth: predict 3D controller motion from 2D body-joint video tracks
// and authenticate VR users on the predicted trajectories.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "motionauth/data/corpus.hpp"
#include "motionauth/data/windows.hpp"
#include "motionauth/errors.hpp"
#include "motionauth/model/checkpoint.hpp"
#include "motionauth/run/config.hpp"
#include "motionauth/run/sweep.hpp"
#include "motionauth/synth/synth.hpp"
#include "motionauth/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace motionauth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;
constexpr int kExitNumerical = 3;

const std::set<std::string>& config_schema() {
  static const std::set<std::string> keys = {
      "corpus.data",    "corpus.manifest", "synth.users",
      "synth.sessions", "synth.trials",    "synth.noise",
      "grid.spec",      "grid.stride",     "variants.list",
      "train.epochs",   "train.batch",     "train.lr",
      "train.lambda",   "model.preset",    "sweep.workers",
      "sweep.curves",   "out.dir",         "run.seed"};
  return keys;
}

// Settings resolved from an optional config file plus CLI flags; flags win.
struct Resolved {
  RunConfig cfg;

  void load_file(const std::string& path) {
    if (path.empty()) return;
    cfg = RunConfig::from_file(path);
    cfg.validate_known(config_schema());
  }
  void override_if(const CLI::Option* opt, const std::string& key,
                   const std::string& value) {
    if (opt && opt->count() > 0) cfg.set(key, value);
  }
};

TrajConfig preset_by_name(const std::string& name) {
  if (name == "desk") return desk_traj_preset();
  if (name == "paper") return paper_traj_preset();
  throw ConfigError("model.preset: expected 'desk' or 'paper', got '" + name +
                    "'");
}

Corpus load_input_corpus(const std::string& data_dir,
                         const std::string& manifest_path) {
  if (data_dir.empty() && manifest_path.empty())
    throw ConfigError("corpus.data: no corpus given (use --data or "
                      "--manifest)");
  fs::path manifest = manifest_path.empty()
                          ? fs::path(data_dir) / "manifest.json"
                          : fs::path(manifest_path);
  if (!fs::exists(manifest))
    throw ConfigError("corpus manifest not found: " + manifest.string());
  Corpus corpus = load_corpus(read_manifest(manifest));
  normalize_corpus(corpus);
  return corpus;
}

std::vector<std::string> parse_variant_list(const std::string& spec) {
  std::vector<std::string> names;
  if (spec == "all") {
    for (const auto& v : all_variants()) names.push_back(v.name);
    return names;
  }
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) names.push_back(variant_by_name(item).name);
  if (names.empty()) throw ConfigError("variants.list: empty variant list");
  return names;
}

std::string require_out(const Resolved& r, const char* cmd) {
  const std::string out = r.cfg.get_str("out.dir", "");
  if (out.empty())
    throw ConfigError(std::string("out.dir: ") + cmd + " needs --out");
  return out;
}

int cmd_synth(const Resolved& r) {
  SynthConfig cfg;
  cfg.n_users = r.cfg.get_int("synth.users", 4);
  cfg.sessions = r.cfg.get_int("synth.sessions", 2);
  cfg.trials = r.cfg.get_int("synth.trials", 10);
  cfg.noise_scale = r.cfg.get_double("synth.noise", 1.0);
  cfg.seed = r.cfg.get_u64("run.seed", 7);
  const std::string out = require_out(r, "synth");
  emit_corpus_files(cfg, out);
  std::cout << "wrote synthetic corpus (" << cfg.n_users << " users) to "
            << out << '\n';
  return kExitOk;
}

int cmd_ingest(const Resolved& r) {
  Corpus corpus = load_input_corpus(r.cfg.get_str("corpus.data", ""),
                                    r.cfg.get_str("corpus.manifest", ""));
  const std::string out = require_out(r, "ingest");
  fs::create_directories(out);
  save_trials(corpus, fs::path(out) / "trials.bin");
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(corpus.digest));
  std::cout << "ingested " << corpus.trials.size() << " trials from "
            << corpus.user_ids().size() << " users; corpus digest " << digest
            << '\n';
  for (int a = 0; a < 3; ++a)
    if (corpus.stats.std_floored[std::size_t(a)])
      std::cout << "note: controller axis " << a
                << " had zero variance; std floored to 1\n";
  return kExitOk;
}

int cmd_build_windows(const Resolved& r, const std::string& trials_path,
                      const std::string& user, int session,
                      const std::string& variant_name, int w, int w_in,
                      const std::string& dump_csv) {
  Corpus corpus = load_trials(trials_path);
  const ExperimentVariant& variant = variant_by_name(variant_name);
  WindowSet set = build_window_set(corpus, variant, user, session, w, w_in,
                                   r.cfg.get_int("grid.stride", 1),
                                   r.cfg.get_u64("run.seed", 1));
  const std::string out = require_out(r, "build-windows");
  fs::create_directories(out);
  char name[64];
  std::snprintf(name, sizeof name, "windows_%s_s%d_%dx%d.bin", user.c_str(),
                session, w, w_in);
  save_window_set(set, fs::path(out) / name);
  if (!dump_csv.empty()) dump_windows_csv(set, dump_csv);
  std::cout << "built " << set.genuine.size() << "+" << set.impostor.size()
            << " windows -> " << (fs::path(out) / name).string() << '\n';
  return kExitOk;
}

int cmd_train(const Resolved& r, const std::string& windows_path) {
  WindowSet train_set = load_window_set(windows_path);
  const ExperimentVariant& variant = variant_by_name(train_set.variant);
  TrainConfig cfg;
  cfg.epochs = r.cfg.get_int("train.epochs", 50);
  cfg.batch_size = r.cfg.get_int("train.batch", 32);
  cfg.lr = float(r.cfg.get_double("train.lr", 1e-4));
  cfg.lambda = float(r.cfg.get_double("train.lambda", 0.5));
  cfg.seed = hash_combine(r.cfg.get_u64("run.seed", 1), "shuffle");
  auto bundle =
      bundle_for(variant, {train_set.w, train_set.w_in},
                 preset_by_name(r.cfg.get_str("model.preset", "desk")),
                 hash_combine(r.cfg.get_u64("run.seed", 1), "init"));
  const std::string out = require_out(r, "train");
  fs::create_directories(out);
  auto log = train_user(*bundle, train_set, cfg);
  save_checkpoint(*bundle, fs::path(out) / "checkpoint.bin");
  write_train_log(fs::path(out) / "train_log.jsonl", log);
  std::cout << "trained " << cfg.epochs << " epochs on " << train_set.total()
            << " windows; final loss " << log.back().loss << '\n';
  return kExitOk;
}

int cmd_eval(const Resolved& r, const std::string& checkpoint_path,
             const std::string& windows_path) {
  if (!fs::exists(checkpoint_path))
    throw ConfigError("checkpoint not found: " + checkpoint_path);
  auto bundle = load_checkpoint(checkpoint_path);
  WindowSet test_set = load_window_set(windows_path);
  EvalRow row = eval_user(*bundle, test_set);
  const std::string out = require_out(r, "eval");
  fs::create_directories(out);
  write_cells_csv(fs::path(out) / "eval.csv", {row}, /*eer_metric=*/true,
                  r.cfg.digest());
  write_curve_csv(fs::path(out) / "curve.csv", row);
  std::ofstream mse_out(fs::path(out) / "eval_mse.csv");
  mse_out << "# config_digest=" << r.cfg.digest() << "\n"
          << "w,w_in,variant,user,value\n"
          << row.w << ',' << row.w_in << ',' << row.variant << ',' << row.user
          << ',' << row.forecast_mse << '\n';
  std::cout << "user " << row.user << " w=" << row.w << " w_in=" << row.w_in
            << ": mse=" << row.forecast_mse << " eer=" << row.eer
            << " threshold=" << row.threshold << '\n';
  return kExitOk;
}

int cmd_sweep(const Resolved& r, int synthetic_users) {
  Corpus corpus;
  if (synthetic_users > 0) {
    SynthConfig scfg;
    scfg.n_users = synthetic_users;
    scfg.trials = r.cfg.get_int("synth.trials", 10);
    scfg.noise_scale = r.cfg.get_double("synth.noise", 1.0);
    scfg.seed = r.cfg.get_u64("run.seed", 7);
    corpus = generate_corpus(scfg);
    normalize_corpus(corpus);
  } else {
    corpus = load_input_corpus(r.cfg.get_str("corpus.data", ""),
                               r.cfg.get_str("corpus.manifest", ""));
  }
  SweepConfig cfg;
  cfg.grid = parse_grid(r.cfg.get_str("grid.spec", "full"));
  cfg.variants = parse_variant_list(r.cfg.get_str("variants.list", "all"));
  cfg.stride = r.cfg.get_int("grid.stride", 1);
  cfg.train.epochs = r.cfg.get_int("train.epochs", 50);
  cfg.train.batch_size = r.cfg.get_int("train.batch", 32);
  cfg.train.lr = float(r.cfg.get_double("train.lr", 1e-4));
  cfg.train.lambda = float(r.cfg.get_double("train.lambda", 0.5));
  cfg.preset = preset_by_name(r.cfg.get_str("model.preset", "desk"));
  cfg.seed = r.cfg.get_u64("run.seed", 1);
  cfg.workers = r.cfg.get_int("sweep.workers", 0);
  cfg.write_curves = r.cfg.get_bool("sweep.curves", false);
  const std::string out = require_out(r, "sweep");
  SweepResult result = run_sweep(corpus, cfg, &std::cerr);
  write_sweep_reports(out, result, r.cfg.digest(), cfg.write_curves);
  std::cout << "sweep wrote " << result.rows.size() << " cells to " << out
            << (result.partial_failure ? " (with failures)" : "") << '\n';
  return result.partial_failure ? kExitPartial : kExitOk;
}

int cmd_report(const Resolved& r, const std::string& eer_cells,
               const std::string& mse_cells) {
  const std::string out = require_out(r, "report");
  fs::create_directories(out);
  CellValues eer, mse;
  if (!eer_cells.empty()) {
    eer = cell_means(read_cells_csv(eer_cells), /*eer_metric=*/true);
    render_summary_csv(fs::path(out) / "eer_summary.csv", eer, r.cfg.digest());
  }
  if (!mse_cells.empty()) {
    mse = cell_means(read_cells_csv(mse_cells), /*eer_metric=*/false);
    render_summary_csv(fs::path(out) / "mse_summary.csv", mse, r.cfg.digest());
  }
  if (eer.empty() && mse.empty())
    throw ConfigError("report: need --eer-cells and/or --mse-cells");
  render_summary_md(fs::path(out) / "summary.md", mse, eer, {}, {},
                    r.cfg.digest());
  std::cout << "rendered summaries to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-modal VR biometrics: 3D trajectory forecasting from 2D "
               "joints with joint authentication"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> out_opts, seed_opts;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "INI-style run config");
    out_opts.push_back(cmd->add_option("--out", out_dir, "output directory"));
    seed_opts.push_back(
        cmd->add_option("--seed", seed, "deterministic run seed"));
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  int users = 4, sessions = 2, trials = 10;
  double noise = 1.0;
  auto* sy_users = synth->add_option("--users", users);
  auto* sy_sessions = synth->add_option("--sessions", sessions);
  auto* sy_trials = synth->add_option("--trials", trials);
  auto* sy_noise = synth->add_option("--noise", noise);
  add_common(synth);

  auto* ingest = app.add_subcommand("ingest", "parse a corpus to trials.bin");
  std::string data_dir, manifest_path;
  auto* in_data = ingest->add_option("--data", data_dir,
                                     "corpus directory with manifest.json");
  auto* in_manifest =
      ingest->add_option("--manifest", manifest_path, "explicit manifest");
  add_common(ingest);

  auto* bw = app.add_subcommand("build-windows",
                                "slide windows over one user/session");
  std::string trials_path, user, variant_name = "3Dfrom2D_WESHKA", dump_csv;
  int session = 1, w = 90, w_in = 60, stride = 1;
  bw->add_option("--trials", trials_path)->required();
  bw->add_option("--user", user)->required();
  bw->add_option("--session", session);
  bw->add_option("--variant", variant_name);
  bw->add_option("-w,--window", w);
  bw->add_option("--w-in", w_in);
  auto* bw_stride = bw->add_option("--stride", stride);
  bw->add_option("--dump-csv", dump_csv, "also write a flat CSV");
  add_common(bw);

  auto* train = app.add_subcommand("train", "train one user model");
  std::string windows_path, preset_name;
  int epochs = 0, batch = 0;
  double lr = 0, lambda = -1;
  train->add_option("--windows", windows_path)->required();
  auto* t_preset = train->add_option("--preset", preset_name);
  auto* t_epochs = train->add_option("--epochs", epochs);
  auto* t_batch = train->add_option("--batch", batch);
  auto* t_lr = train->add_option("--lr", lr);
  auto* t_lambda = train->add_option("--lambda", lambda);
  add_common(train);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string checkpoint_path, eval_windows;
  eval->add_option("--checkpoint", checkpoint_path)->required();
  eval->add_option("--windows", eval_windows)->required();
  add_common(eval);

  auto* sweep = app.add_subcommand("sweep", "train/eval over the grid");
  int synthetic_users = 0;
  std::string grid_spec, variant_list, sweep_preset;
  int sweep_epochs = 0, sweep_batch = 0, sweep_stride = 0, workers = 0;
  double sweep_lr = 0, sweep_lambda = -1, sweep_noise = -1;
  bool curves = false;
  auto* sw_data = sweep->add_option("--data", data_dir);
  auto* sw_manifest = sweep->add_option("--manifest", manifest_path);
  sweep->add_option("--synthetic", synthetic_users,
                    "generate an in-memory corpus with N users");
  int sweep_trials = 0;
  auto* s_trials = sweep->add_option("--trials", sweep_trials,
                                     "trials per session (synthetic corpus)");
  auto* s_noise = sweep->add_option("--noise", sweep_noise);
  auto* s_grid =
      sweep->add_option("--grid", grid_spec, "full, small, or 40x30,90x60");
  auto* s_var = sweep->add_option("--variant", variant_list,
                                  "comma-separated variants, or all");
  auto* s_preset = sweep->add_option("--preset", sweep_preset);
  auto* s_epochs = sweep->add_option("--epochs", sweep_epochs);
  auto* s_batch = sweep->add_option("--batch", sweep_batch);
  auto* s_lr = sweep->add_option("--lr", sweep_lr);
  auto* s_lambda = sweep->add_option("--lambda", sweep_lambda);
  auto* s_stride = sweep->add_option("--stride", sweep_stride);
  auto* s_workers = sweep->add_option("--workers", workers);
  auto* s_curves = sweep->add_flag("--curves", curves, "write ROC curves");
  add_common(sweep);

  auto* report =
      app.add_subcommand("report", "re-render summaries from cell CSVs");
  std::string eer_cells, mse_cells;
  report->add_option("--eer-cells", eer_cells);
  report->add_option("--mse-cells", mse_cells);
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  try {
    Resolved r;
    r.load_file(config_path);
    for (auto* opt : out_opts) r.override_if(opt, "out.dir", out_dir);
    for (auto* opt : seed_opts)
      r.override_if(opt, "run.seed", std::to_string(seed));

    if (synth->parsed()) {
      r.override_if(sy_users, "synth.users", std::to_string(users));
      r.override_if(sy_sessions, "synth.sessions", std::to_string(sessions));
      r.override_if(sy_trials, "synth.trials", std::to_string(trials));
      r.override_if(sy_noise, "synth.noise", std::to_string(noise));
      return cmd_synth(r);
    }
    if (ingest->parsed()) {
      r.override_if(in_data, "corpus.data", data_dir);
      r.override_if(in_manifest, "corpus.manifest", manifest_path);
      return cmd_ingest(r);
    }
    if (bw->parsed()) {
      r.override_if(bw_stride, "grid.stride", std::to_string(stride));
      return cmd_build_windows(r, trials_path, user, session, variant_name, w,
                               w_in, dump_csv);
    }
    if (train->parsed()) {
      r.override_if(t_preset, "model.preset", preset_name);
      r.override_if(t_epochs, "train.epochs", std::to_string(epochs));
      r.override_if(t_batch, "train.batch", std::to_string(batch));
      r.override_if(t_lr, "train.lr", std::to_string(lr));
      r.override_if(t_lambda, "train.lambda", std::to_string(lambda));
      return cmd_train(r, windows_path);
    }
    if (eval->parsed()) return cmd_eval(r, checkpoint_path, eval_windows);
    if (sweep->parsed()) {
      r.override_if(sw_data, "corpus.data", data_dir);
      r.override_if(sw_manifest, "corpus.manifest", manifest_path);
      r.override_if(s_trials, "synth.trials", std::to_string(sweep_trials));
      r.override_if(s_noise, "synth.noise", std::to_string(sweep_noise));
      r.override_if(s_grid, "grid.spec", grid_spec);
      r.override_if(s_var, "variants.list", variant_list);
      r.override_if(s_preset, "model.preset", sweep_preset);
      r.override_if(s_epochs, "train.epochs", std::to_string(sweep_epochs));
      r.override_if(s_batch, "train.batch", std::to_string(sweep_batch));
      r.override_if(s_lr, "train.lr", std::to_string(sweep_lr));
      r.override_if(s_lambda, "train.lambda", std::to_string(sweep_lambda));
      r.override_if(s_stride, "grid.stride", std::to_string(sweep_stride));
      r.override_if(s_workers, "sweep.workers", std::to_string(workers));
      r.override_if(s_curves, "sweep.curves", curves ? "true" : "false");
      return cmd_sweep(r, synthetic_users);
    }
    if (report->parsed()) return cmd_report(r, eer_cells, mse_cells);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
