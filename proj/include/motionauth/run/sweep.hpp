#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "motionauth/data/corpus.hpp"
#include "motionauth/eval/report.hpp"
#include "motionauth/run/variants.hpp"
#include "motionauth/train/trainer.hpp"

namespace motionauth {

struct SweepConfig {
  std::vector<GridCombo> grid;
  std::vector<std::string> variants;  // names from all_variants()
  int stride = 1;
  TrainConfig train;
  TrajConfig preset;  // d_model/n_head/d_ffn template per cell
  std::uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency
  bool write_curves = false;
};

struct SweepResult {
  std::vector<EvalRow> rows;  // canonical (variant, combo, user) order
  CellValues pooled_eer;      // scores merged across users per cell
  bool partial_failure = false;
};

// Trains and evaluates one model per (user, combo, variant) cell over a
// worker pool. Cell jobs are independent; results land in preassigned slots,
// so reports are byte-identical for any worker count.
SweepResult run_sweep(const Corpus& corpus, const SweepConfig& cfg,
                      std::ostream* progress = nullptr);

// eer_table.csv, mse_table.csv, summary CSVs/markdown, optional ROC curves.
void write_sweep_reports(const std::filesystem::path& dir,
                         const SweepResult& result,
                         const std::string& config_digest, bool write_curves);

}  // namespace motionauth
