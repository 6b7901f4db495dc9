#include "motionauth/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <set>

#include "motionauth/errors.hpp"

namespace motionauth {

namespace {

std::string fmt_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Variants in published column order first, then any others alphabetically.
std::vector<std::string> ordered_variants(const CellValues& values) {
  std::set<std::string> present;
  for (const auto& [key, value] : values) present.insert(std::get<0>(key));
  std::vector<std::string> out;
  for (const auto& v : all_variants())
    if (present.erase(v.name)) out.push_back(v.name);
  out.insert(out.end(), present.begin(), present.end());
  return out;
}

// Combos in published row order first, then any others by (w, w_in).
std::vector<GridCombo> ordered_combos(const CellValues& values) {
  std::set<std::pair<int, int>> present;
  for (const auto& [key, value] : values)
    present.insert({std::get<1>(key), std::get<2>(key)});
  std::vector<GridCombo> out;
  for (const auto& c : full_grid())
    if (present.erase({c.w, c.w_in})) out.push_back(c);
  for (const auto& [w, win] : present) out.push_back({w, win});
  return out;
}

}  // namespace

void write_cells_csv(const std::filesystem::path& path,
                     const std::vector<EvalRow>& rows, bool eer_metric,
                     const std::string& config_digest) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# config_digest=" << config_digest << '\n';
  out << "w,w_in,variant,user,value\n";
  for (const auto& r : rows) {
    const double v = r.failed ? std::nan("")
                              : (eer_metric ? r.eer : r.forecast_mse);
    out << r.w << ',' << r.w_in << ',' << r.variant << ',' << r.user << ','
        << fmt_value(v) << '\n';
  }
}

std::map<std::string, double> summary_column_averages(
    const CellValues& values) {
  std::map<std::string, double> sums;
  std::map<std::string, int> counts;
  for (const auto& [key, value] : values) {
    if (std::isnan(value)) continue;
    sums[std::get<0>(key)] += value;
    counts[std::get<0>(key)] += 1;
  }
  std::map<std::string, double> avg;
  for (const auto& [name, total] : sums) avg[name] = total / counts[name];
  return avg;
}

void render_summary_csv(const std::filesystem::path& path,
                        const CellValues& values,
                        const std::string& config_digest) {
  const auto variants = ordered_variants(values);
  const auto combos = ordered_combos(values);
  const auto averages = summary_column_averages(values);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# config_digest=" << config_digest << '\n';
  out << "w,w_in";
  for (const auto& v : variants) out << ',' << v;
  out << '\n';
  for (const auto& c : combos) {
    out << c.w << ',' << c.w_in;
    for (const auto& v : variants) {
      auto it = values.find({v, c.w, c.w_in});
      out << ',' << (it == values.end() ? "" : fmt_value(it->second));
    }
    out << '\n';
  }
  out << "AVG,";
  for (const auto& v : variants) {
    auto it = averages.find(v);
    out << ',' << (it == averages.end() ? "" : fmt_value(it->second));
  }
  out << '\n';
}

CellValues cell_means(const std::vector<EvalRow>& rows, bool eer_metric) {
  std::map<std::tuple<std::string, int, int>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (r.failed) continue;
    auto& slot = acc[{r.variant, r.w, r.w_in}];
    slot.first += eer_metric ? r.eer : r.forecast_mse;
    slot.second += 1;
  }
  CellValues out;
  for (const auto& [key, slot] : acc) out[key] = slot.first / slot.second;
  return out;
}

std::vector<EvalRow> read_cells_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cells CSV " + path.string());
  std::vector<EvalRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("w,w_in", 0) == 0) continue;  // header
    std::istringstream ls(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(ls, f[i], ','))
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": expected 5 fields");
    EvalRow row;
    try {
      row.w = std::stoi(f[0]);
      row.w_in = std::stoi(f[1]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": bad window sizes");
    }
    row.variant = f[2];
    row.user = f[3];
    if (f[4] == "nan" || f[4].empty()) {
      row.failed = true;
    } else {
      try {
        const double v = std::stod(f[4]);
        row.eer = v;
        row.forecast_mse = v;
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": bad value '" + f[4] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void render_summary_md(const std::filesystem::path& path,
                       const CellValues& mse, const CellValues& eer,
                       const CellValues& eer_pooled,
                       const std::vector<std::string>& notes,
                       const std::string& config_digest) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# Sweep summary\n\n";
  out << "config digest: `" << config_digest << "`\n\n";
  const auto table = [&out](const char* title, const CellValues& values) {
    if (values.empty()) return;
    const auto variants = ordered_variants(values);
    const auto combos = ordered_combos(values);
    const auto averages = summary_column_averages(values);
    out << "## " << title << "\n\n";
    out << "| w | w_in |";
    for (const auto& v : variants) out << ' ' << v << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < variants.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& c : combos) {
      out << "| " << c.w << " | " << c.w_in << " |";
      for (const auto& v : variants) {
        auto it = values.find({v, c.w, c.w_in});
        out << ' ' << (it == values.end() ? "-" : fmt_value(it->second))
            << " |";
      }
      out << '\n';
    }
    out << "| **AVG** | |";
    for (const auto& v : variants) {
      auto it = averages.find(v);
      out << ' ' << (it == averages.end() ? "-" : fmt_value(it->second))
          << " |";
    }
    out << "\n\n";
  };
  table("Forecast MSE (mean over users)", mse);
  table("EER (mean of per-user EERs)", eer);
  table("EER (pooled scores across users)", eer_pooled);
  if (!notes.empty()) {
    out << "## Notes\n\n";
    for (const auto& n : notes) out << "- " << n << '\n';
  }
}

void write_curve_csv(const std::filesystem::path& path, const EvalRow& row) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "threshold,far,frr\n";
  for (const auto& p : row.curve)
    out << fmt_value(p.threshold) << ',' << fmt_value(p.far) << ','
        << fmt_value(p.frr) << '\n';
}

}  // namespace motionauth
