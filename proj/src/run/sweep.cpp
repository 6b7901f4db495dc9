#include "motionauth/run/sweep.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "motionauth/errors.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

namespace {

struct CellJob {
  const ExperimentVariant* variant = nullptr;
  GridCombo combo;
  std::string user;
};

std::uint64_t cell_seed(std::uint64_t base, const CellJob& job) {
  std::uint64_t h = hash_combine(base, job.variant->name);
  h = hash_combine(h, std::uint64_t(job.combo.w));
  h = hash_combine(h, std::uint64_t(job.combo.w_in));
  return hash_combine(h, job.user);
}

EvalRow run_cell(const Corpus& corpus, const SweepConfig& cfg,
                 const CellJob& job) {
  const std::uint64_t seed = cell_seed(cfg.seed, job);
  SplitWindows split =
      session_split(corpus, *job.variant, job.user, job.combo.w,
                    job.combo.w_in, cfg.stride, hash_combine(seed, "windows"));
  auto bundle = bundle_for(*job.variant, job.combo, cfg.preset,
                           hash_combine(seed, "init"));
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = hash_combine(seed, "shuffle");
  train_user(*bundle, split.train, train_cfg);
  return eval_user(*bundle, split.test);
}

}  // namespace

SweepResult run_sweep(const Corpus& corpus, const SweepConfig& cfg,
                      std::ostream* progress) {
  if (cfg.grid.empty()) throw ConfigError("sweep: empty grid");
  if (cfg.variants.empty()) throw ConfigError("sweep: no variants selected");

  std::vector<CellJob> jobs;
  for (const auto& name : cfg.variants) {
    const ExperimentVariant& variant = variant_by_name(name);
    for (const auto& combo : cfg.grid)
      for (const auto& user : corpus.user_ids())
        jobs.push_back({&variant, combo, user});
  }

  SweepResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const CellJob& job = jobs[i];
      EvalRow& row = result.rows[i];
      try {
        row = run_cell(corpus, cfg, job);
      } catch (const std::exception& e) {
        row.variant = job.variant->name;
        row.w = job.combo.w;
        row.w_in = job.combo.w_in;
        row.user = job.user;
        row.failed = true;
        row.error = e.what();
      }
      if (progress) {
        std::lock_guard<std::mutex> lock(log_mutex);
        *progress << "cell " << job.variant->name << " w=" << job.combo.w
                  << " w_in=" << job.combo.w_in << " user=" << job.user;
        if (row.failed)
          *progress << " FAILED: " << row.error << '\n';
        else
          *progress << " mse=" << row.forecast_mse << " eer=" << row.eer
                    << '\n';
        progress->flush();
      }
    }
  };

  int n_workers = cfg.workers > 0
                      ? cfg.workers
                      : int(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min<int>(n_workers, int(jobs.size())));
  std::vector<std::thread> threads;
  for (int i = 1; i < n_workers; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  for (const auto& row : result.rows)
    result.partial_failure = result.partial_failure || row.failed;

  // Pooled EER: merge decision scores across users per (variant, combo).
  std::map<std::tuple<std::string, int, int>,
           std::pair<std::vector<double>, std::vector<double>>>
      pools;
  for (const auto& row : result.rows) {
    if (row.failed) continue;
    auto& pool = pools[{row.variant, row.w, row.w_in}];
    pool.first.insert(pool.first.end(), row.genuine_scores.begin(),
                      row.genuine_scores.end());
    pool.second.insert(pool.second.end(), row.impostor_scores.begin(),
                       row.impostor_scores.end());
  }
  for (const auto& [key, pool] : pools)
    result.pooled_eer[key] = compute_eer(pool.first, pool.second).eer;
  return result;
}

void write_sweep_reports(const std::filesystem::path& dir,
                         const SweepResult& result,
                         const std::string& config_digest,
                         bool write_curves) {
  std::filesystem::create_directories(dir);
  write_cells_csv(dir / "eer_table.csv", result.rows, /*eer_metric=*/true,
                  config_digest);
  write_cells_csv(dir / "mse_table.csv", result.rows, /*eer_metric=*/false,
                  config_digest);
  const CellValues mse = cell_means(result.rows, /*eer_metric=*/false);
  const CellValues eer = cell_means(result.rows, /*eer_metric=*/true);
  render_summary_csv(dir / "eer_summary.csv", eer, config_digest);
  render_summary_csv(dir / "mse_summary.csv", mse, config_digest);
  std::vector<std::string> notes;
  for (const auto& row : result.rows)
    if (row.failed)
      notes.push_back("cell " + row.variant + " w=" + std::to_string(row.w) +
                      " w_in=" + std::to_string(row.w_in) + " user=" +
                      row.user + " failed: " + row.error);
  render_summary_md(dir / "summary.md", mse, eer, result.pooled_eer, notes,
                    config_digest);
  if (write_curves) {
    const auto curve_dir = dir / "curves";
    std::filesystem::create_directories(curve_dir);
    for (const auto& row : result.rows) {
      if (row.failed) continue;
      write_curve_csv(curve_dir / (row.variant + "_" +
                                   std::to_string(row.w) + "x" +
                                   std::to_string(row.w_in) + "_" + row.user +
                                   ".csv"),
                      row);
    }
  }
}

}  // namespace motionauth
