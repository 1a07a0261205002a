// Copyright 2026 The SupraHMM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "suprahmm/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "suprahmm/error.hpp"
#include "suprahmm/numeric.hpp"

namespace suprahmm {

namespace {

std::string full_precision(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string tenth(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << round_tenth(x);
  return os.str();
}

}  // namespace

void ConfusionMatrix::validate() const {
  if (labels.empty()) throw ConfigError("ConfusionMatrix: no labels");
  if (percent.size() != labels.size() * labels.size()) {
    throw ConfigError("ConfusionMatrix: shape mismatch");
  }
  const int n = size();
  for (int c = 0; c < n; ++c) {
    std::vector<double> column(n);
    for (int r = 0; r < n; ++r) column[r] = at(r, c);
    if (!valid_confusion_column(column)) {
      throw ConfigError("ConfusionMatrix: column " + labels[c] +
                        " is not a valid percentage column");
    }
  }
}

bool valid_confusion_column(std::span<const double> column) {
  double total = 0.0;
  for (double v : column) {
    if (!(v >= 0.0)) return false;
    total += v;
  }
  return std::abs(total - 100.0) <= 0.01;
}

ConfusionMatrix confusion_matrix(const std::vector<std::string> &labels,
                                 const std::vector<int> &truth,
                                 const std::vector<int> &predicted) {
  if (labels.empty()) throw ConfigError("confusion_matrix: no labels");
  if (truth.empty()) throw ConfigError("confusion_matrix: empty input");
  if (truth.size() != predicted.size()) {
    throw ConfigError("confusion_matrix: length mismatch");
  }
  const int n = static_cast<int>(labels.size());
  std::vector<int> counts(static_cast<std::size_t>(n) * n, 0);
  std::vector<int> column_totals(n, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n || predicted[i] < 0 ||
        predicted[i] >= n) {
      throw ConfigError("confusion_matrix: label index out of range");
    }
    ++counts[static_cast<std::size_t>(predicted[i]) * n + truth[i]];
    ++column_totals[truth[i]];
  }
  for (int c = 0; c < n; ++c) {
    if (column_totals[c] == 0) {
      throw ConfigError("confusion_matrix: no samples for condition " +
                        labels[c]);
    }
  }
  ConfusionMatrix out;
  out.labels = labels;
  out.percent.resize(counts.size());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      out.percent[static_cast<std::size_t>(r) * n + c] =
          100.0 * counts[static_cast<std::size_t>(r) * n + c] /
          column_totals[c];
    }
  }
  out.validate();
  return out;
}

PerformanceTable performance_table(const ConfusionMatrix &matrix) {
  matrix.validate();
  std::vector<double> diagonal(matrix.size());
  for (int i = 0; i < matrix.size(); ++i) diagonal[i] = matrix.at(i, i);
  return performance_table(matrix.labels, diagonal);
}

PerformanceTable performance_table(const std::vector<std::string> &labels,
                                   const std::vector<double> &per_condition) {
  if (labels.empty() || labels.size() != per_condition.size()) {
    throw ConfigError("performance_table: label/value mismatch");
  }
  PerformanceTable out;
  out.labels = labels;
  out.per_condition = per_condition;
  double total = 0.0;
  for (double v : per_condition) {
    if (v < 0.0 || v > 100.0) {
      throw ConfigError("performance_table: percentage outside [0, 100]");
    }
    total += v;
  }
  out.average = total / static_cast<double>(per_condition.size());
  return out;
}

double relative_improvement(double new_value, double old_value) {
  if (old_value <= 0.0) {
    throw ConfigError("relative_improvement: baseline must be positive");
  }
  return 100.0 * (new_value - old_value) / old_value;
}

double pooled_sd(double sd_x, double sd_y) {
  if (sd_x < 0.0 || sd_y < 0.0) {
    throw ConfigError("pooled_sd: negative standard deviation");
  }
  return std::sqrt((sd_x * sd_x + sd_y * sd_y) / 2.0);
}

double students_t(double mean_x, double mean_y, double sd_pooled) {
  if (sd_pooled < 0.0) throw ConfigError("students_t: negative sd");
  if (sd_pooled == 0.0) {
    if (mean_x == mean_y) return 0.0;
    throw ConfigError("students_t: zero pooled sd with unequal means");
  }
  return (mean_x - mean_y) / sd_pooled;
}

std::pair<double, double> confidence_interval(double mean_x, double mean_y,
                                              double sd_pooled,
                                              double critical) {
  if (sd_pooled < 0.0) {
    throw ConfigError("confidence_interval: negative sd");
  }
  const double diff = mean_x - mean_y;
  const double half = critical * sd_pooled;
  return {diff - half, diff + half};
}

TTestResult t_test(double mean_x, double mean_y, double sd_x, double sd_y,
                   double critical) {
  TTestResult out;
  out.mean_x = mean_x;
  out.mean_y = mean_y;
  out.sd_pooled = pooled_sd(sd_x, sd_y);
  out.t = students_t(mean_x, mean_y, out.sd_pooled);
  auto [low, high] = confidence_interval(mean_x, mean_y, out.sd_pooled,
                                         critical);
  out.low = low;
  out.high = high;
  return out;
}

double sample_sd(const std::vector<double> &values) {
  if (values.size() < 2) {
    throw ConfigError("sample_sd: need at least two values");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

double standard_error(const std::vector<double> &values) {
  return sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
}

std::vector<SweepPoint> alpha_sweep(
    const std::vector<std::vector<ScorePair>> &scores,
    const std::vector<int> &truth, const std::vector<std::string> &labels,
    const std::vector<double> &alphas) {
  if (scores.empty() || scores.size() != truth.size()) {
    throw ConfigError("alpha_sweep: score/truth mismatch");
  }
  if (alphas.empty()) throw ConfigError("alpha_sweep: no alphas");
  std::vector<SweepPoint> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    if (alpha < 0.0 || alpha > 1.0) {
      throw ConfigError("alpha_sweep: alpha outside [0, 1]");
    }
    std::vector<int> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      predicted[i] = classify_scores(scores[i], alpha);
    }
    PerformanceTable table =
        performance_table(confusion_matrix(labels, truth, predicted));
    SweepPoint point;
    point.alpha = alpha;
    point.per_condition = table.per_condition;
    point.average = table.average;
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> out;
  out.reserve(11);
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

void write_confusion_csv(const std::filesystem::path &path,
                         const ConfusionMatrix &matrix) {
  matrix.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "identified_vs_true";
  for (const std::string &label : matrix.labels) out << "," << label;
  out << "\n";
  for (int r = 0; r < matrix.size(); ++r) {
    out << matrix.labels[r];
    for (int c = 0; c < matrix.size(); ++c) {
      out << "," << full_precision(matrix.at(r, c));
    }
    out << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

void write_performance_csv(const std::filesystem::path &path,
                           const PerformanceTable &table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "condition,identification_percent\n";
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    out << table.labels[i] << "," << full_precision(table.per_condition[i])
        << "\n";
  }
  out << "average," << full_precision(table.average) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

void write_sweep_csv(const std::filesystem::path &path,
                     const std::vector<SweepPoint> &sweep,
                     const std::vector<std::string> &labels) {
  if (sweep.empty()) throw ConfigError("write_sweep_csv: empty sweep");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "alpha";
  for (const std::string &label : labels) out << "," << label;
  out << ",average\n";
  for (const SweepPoint &point : sweep) {
    if (point.per_condition.size() != labels.size()) {
      throw ConfigError("write_sweep_csv: label/point size mismatch");
    }
    out << full_precision(point.alpha);
    for (double value : point.per_condition) {
      out << "," << full_precision(value);
    }
    out << "," << full_precision(point.average) << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

void write_comparison_csv(const std::filesystem::path &path,
                          const std::vector<ComparisonRow> &rows) {
  if (rows.empty()) throw ConfigError("write_comparison_csv: no rows");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "system";
  for (const std::string &label : rows.front().table.labels) {
    out << "," << label;
  }
  out << ",average\n";
  for (const ComparisonRow &row : rows) {
    out << row.system;
    for (double v : row.table.per_condition) out << "," << full_precision(v);
    out << "," << full_precision(row.table.average) << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

void write_ttest_csv(
    const std::filesystem::path &path,
    const std::vector<std::pair<std::string, TTestResult>> &rows) {
  if (rows.empty()) throw ConfigError("write_ttest_csv: no rows");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "comparison,mean_x,mean_y,sd_pooled,t,ci_low,ci_high\n";
  for (const auto &[name, result] : rows) {
    out << name << "," << full_precision(result.mean_x) << ","
        << full_precision(result.mean_y) << ","
        << full_precision(result.sd_pooled) << ","
        << full_precision(result.t) << "," << full_precision(result.low)
        << "," << full_precision(result.high) << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

void write_report(const std::filesystem::path &path,
                  const ReportContent &content) {
  content.confusion.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "suprahmm-report v1\n";
  out << "values rounded to 0.1; full precision in the CSV files\n\n";

  out << "confusion matrix (column = true condition, row = identified)\n";
  out << std::left;
  out << "          ";
  for (const std::string &label : content.confusion.labels) {
    out << std::setw(10) << label;
  }
  out << "\n";
  for (int r = 0; r < content.confusion.size(); ++r) {
    out << std::setw(10) << content.confusion.labels[r];
    for (int c = 0; c < content.confusion.size(); ++c) {
      out << std::setw(10) << tenth(content.confusion.at(r, c));
    }
    out << "\n";
  }
  out << "\n";

  out << "identification performance\n";
  for (std::size_t i = 0; i < content.performance.labels.size(); ++i) {
    out << std::setw(10) << content.performance.labels[i]
        << tenth(content.performance.per_condition[i]) << "\n";
  }
  out << std::setw(10) << "average" << tenth(content.performance.average)
      << "\n\n";

  if (!content.comparisons.empty()) {
    out << "system comparison\n";
    for (const ComparisonRow &row : content.comparisons) {
      out << std::setw(24) << row.system << tenth(row.table.average) << "\n";
    }
    out << "\n";
  }
  if (!content.ttests.empty()) {
    out << "significance (t, then 90% interval)\n";
    for (const auto &[name, result] : content.ttests) {
      out << std::setw(24) << name << std::setprecision(3) << std::fixed
          << result.t << "  [" << tenth(result.low) << ", "
          << tenth(result.high) << "]\n";
    }
    out << std::setprecision(6);
    out << "\n";
  }
  if (!content.sweep.empty()) {
    out << "fusion-weight sweep\n";
    for (const SweepPoint &point : content.sweep) {
      out << std::setw(10) << std::setprecision(1) << std::fixed
          << point.alpha << tenth(point.average) << "\n";
    }
    out << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace suprahmm
