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

#ifndef SUPRAHMM_EVALUATION_HPP_
#define SUPRAHMM_EVALUATION_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "suprahmm/classifier.hpp"

namespace suprahmm {

// Column-normalized percentages: column = true condition, row =
// identified condition, so each column sums to 100.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<double> percent;  // row-major, identified x true

  int size() const { return static_cast<int>(labels.size()); }
  double at(int identified, int truth) const {
    return percent[static_cast<std::size_t>(identified) * labels.size() +
                   truth];
  }
  void validate() const;
};

// True when the entries are non-negative and sum to 100 within 0.01.
bool valid_confusion_column(std::span<const double> column);

ConfusionMatrix confusion_matrix(const std::vector<std::string> &labels,
                                 const std::vector<int> &truth,
                                 const std::vector<int> &predicted);

struct PerformanceTable {
  std::vector<std::string> labels;
  std::vector<double> per_condition;  // identification percentage
  double average = 0.0;
};

PerformanceTable performance_table(const ConfusionMatrix &matrix);
PerformanceTable performance_table(const std::vector<std::string> &labels,
                                   const std::vector<double> &per_condition);

// 100 * (new_value - old_value) / old_value
double relative_improvement(double new_value, double old_value);

double pooled_sd(double sd_x, double sd_y);
double students_t(double mean_x, double mean_y, double sd_pooled);
std::pair<double, double> confidence_interval(double mean_x, double mean_y,
                                              double sd_pooled,
                                              double critical = 1.645);

struct TTestResult {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sd_pooled = 0.0;
  double t = 0.0;
  double low = 0.0;
  double high = 0.0;
};

TTestResult t_test(double mean_x, double mean_y, double sd_x, double sd_y,
                   double critical = 1.645);

// Sample standard deviation (n - 1 denominator) of the per-condition
// percentages, and its standard error (sd / sqrt(n)).
double sample_sd(const std::vector<double> &values);
double standard_error(const std::vector<double> &values);

struct SweepPoint {
  double alpha = 0.0;
  std::vector<double> per_condition;
  double average = 0.0;
};

// Re-fuses already-computed score streams at each alpha; nothing is
// retrained or rescored.
std::vector<SweepPoint> alpha_sweep(
    const std::vector<std::vector<ScorePair>> &scores,
    const std::vector<int> &truth, const std::vector<std::string> &labels,
    const std::vector<double> &alphas);

std::vector<double> default_alpha_grid();  // 0.0, 0.1, ..., 1.0

// CSV emitters write full-precision values; the combined text report
// rounds to the 0.1 display precision.
void write_confusion_csv(const std::filesystem::path &path,
                         const ConfusionMatrix &matrix);
void write_performance_csv(const std::filesystem::path &path,
                           const PerformanceTable &table);
void write_sweep_csv(const std::filesystem::path &path,
                     const std::vector<SweepPoint> &sweep,
                     const std::vector<std::string> &labels);

struct ComparisonRow {
  std::string system;
  PerformanceTable table;
};

void write_comparison_csv(const std::filesystem::path &path,
                          const std::vector<ComparisonRow> &rows);
void write_ttest_csv(const std::filesystem::path &path,
                     const std::vector<std::pair<std::string, TTestResult>>
                         &rows);

struct ReportContent {
  ConfusionMatrix confusion;
  PerformanceTable performance;
  std::vector<ComparisonRow> comparisons;          // optional
  std::vector<std::pair<std::string, TTestResult>> ttests;  // optional
  std::vector<SweepPoint> sweep;                   // optional
};

void write_report(const std::filesystem::path &path,
                  const ReportContent &content);

}  // namespace suprahmm

#endif  // SUPRAHMM_EVALUATION_HPP_
