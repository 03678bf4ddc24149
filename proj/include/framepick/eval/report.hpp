#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "framepick/eval/harness.hpp"

namespace framepick::eval {

/// One accuracy line. Overall rows have an empty task.
struct AccuracyRow {
  CellKey cell;
  bool overall = true;
  std::string task;
  std::int64_t correct = 0;
  std::int64_t total = 0;
  double accuracy() const noexcept {
    return static_cast<double>(correct) / static_cast<double>(total);
  }
  friend bool operator==(const AccuracyRow&, const AccuracyRow&) = default;
};

/// Rows sorted by cell; within a cell the overall row comes first, then tasks
/// by name.
struct AccuracyReport {
  std::vector<AccuracyRow> rows;
  std::vector<AccuracyRow> overall() const;
};

/// Counts per cell and task tag. Throws ValidationError on an empty record set.
AccuracyReport aggregate(const std::vector<EvalRecord>& records);

/// Accuracy in tenths of a percent, rounded half up with exact integers.
std::int64_t accuracy_tenths(std::int64_t correct, std::int64_t total);
/// "73.0"
std::string format_tenths(std::int64_t tenths);

inline constexpr std::string_view kReportCsvHeader =
    "model,dataset,strategy,n_max,scope,task,correct,total,accuracy";

/// CSV with kReportCsvHeader; scope is "overall" or "task", accuracy has six
/// decimals.
std::string report_csv(const AccuracyReport& report);
/// Inverse of report_csv. Throws ValidationError on a foreign header, an
/// unknown strategy or inconsistent counts.
AccuracyReport parse_report_csv(std::string_view text, std::string_view source = "report");

/// Markdown: one overall table with a row per (dataset, model, n_max) and a
/// column per strategy (First, Center, FPS, MaxInfo, CSTA), then the same
/// layout per task tag. Cells are percentages with one decimal.
std::string report_markdown(const AccuracyReport& report);

/// A literature accuracy (percent) for a model, dataset and strategy.
struct ReportedScore {
  std::string model;
  std::string dataset;
  Strategy strategy;
  std::int64_t tenths;  // percent * 10, rounded half up
};

/// CSV with at least the columns model, dataset, strategy, accuracy (percent);
/// strategy accepts names (fps) or labels (FPS, CSTA).
std::vector<ReportedScore> parse_reported_csv(std::string_view text);

/// Merges several reports. Identical duplicate rows are collapsed; the same
/// row with different counts is a ValidationError.
AccuracyReport merge_reports(const std::vector<AccuracyReport>& reports);

/// Long-form comparison over overall rows:
/// model,dataset,n_max,strategy,correct,total,measured,reported,delta
/// with percentages at one decimal and delta signed ("+14.8"); reported and
/// delta are empty without a literature score.
std::string comparison_csv(const AccuracyReport& merged, const std::vector<ReportedScore>& reported);
std::string comparison_markdown(const AccuracyReport& merged,
                                const std::vector<ReportedScore>& reported);

/// "+14.8", "-2.1", "+0.0"
std::string format_delta_tenths(std::int64_t delta);

// Minimal RFC 4180 helpers.
std::string csv_field(std::string_view value);
/// Splits CSV text into records; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace framepick::eval
