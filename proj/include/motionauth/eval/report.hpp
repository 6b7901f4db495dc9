#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "motionauth/eval/eer.hpp"
#include "motionauth/run/variants.hpp"

namespace motionauth {

// Per (user, w, w_in, variant) evaluation outcome.
struct EvalRow {
  std::string variant;
  int w = 0;
  int w_in = 0;
  std::string user;
  double forecast_mse = 0;
  double eer = 0;
  double threshold = 0;
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;
  std::vector<RocPoint> curve;
  std::vector<double> genuine_scores;
  std::vector<double> impostor_scores;
  bool failed = false;
  std::string error;
};

// (variant, w, w_in) -> aggregated value.
using CellValues = std::map<std::tuple<std::string, int, int>, double>;

// Long-format per-user tables: columns w,w_in,variant,user,value. The first
// line is a comment embedding the run's config digest.
void write_cells_csv(const std::filesystem::path& path,
                     const std::vector<EvalRow>& rows, bool eer_metric,
                     const std::string& config_digest);

// Wide table mirroring the published layout: one row per (w, w_in), one
// column per variant, and a final AVG row holding each column's mean.
void render_summary_csv(const std::filesystem::path& path,
                        const CellValues& values,
                        const std::string& config_digest);

std::map<std::string, double> summary_column_averages(
    const CellValues& values);

// Markdown rendering of both summaries plus run metadata.
void render_summary_md(const std::filesystem::path& path,
                       const CellValues& mse, const CellValues& eer,
                       const CellValues& eer_pooled,
                       const std::vector<std::string>& notes,
                       const std::string& config_digest);

// Mean over users per cell (failed rows are skipped).
CellValues cell_means(const std::vector<EvalRow>& rows, bool eer_metric);

// Reads a long-format cells CSV back; the value lands in both metric fields
// (the caller knows which one the file held). nan values mark failed rows.
std::vector<EvalRow> read_cells_csv(const std::filesystem::path& path);

// Threshold curve CSV for one row: threshold,far,frr.
void write_curve_csv(const std::filesystem::path& path, const EvalRow& row);

}  // namespace motionauth
