#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "framepick/error.hpp"
#include "framepick/eval/adapter.hpp"
#include "framepick/eval/dataset.hpp"
#include "framepick/frame_extract.hpp"
#include "framepick/sampling.hpp"
#include "framepick/types.hpp"

namespace framepick::eval {

/// One evaluation cell: a model on a dataset under one sampling budget.
struct CellKey {
  std::string model;
  std::string dataset;
  Strategy strategy = Strategy::UniformFps;
  std::int64_t n_max = 96;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

std::string describe(const CellKey& cell);

enum class RecordCause { Ok, Unparsed, Timeout };
std::string_view to_string(RecordCause cause) noexcept;

struct EvalRecord {
  CellKey cell;
  std::string item_id;
  std::string video_id;
  std::string task_tag;
  std::vector<FrameIndex> frame_indices;
  std::string raw_response;
  std::optional<char> parsed_label;  // nullopt = Unparsed
  char answer_label = 'A';
  bool correct = false;  // parsed_label == answer_label
  RecordCause cause = RecordCause::Ok;
  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct HarnessOptions {
  std::size_t concurrency = 4;  // queries in flight
  std::chrono::milliseconds timeout{120'000};
  /// When set, frames are decoded into decoder->work_dir before querying.
  /// Otherwise images are expected under frames_dir already.
  std::optional<DecoderConfig> decoder;
  std::filesystem::path frames_dir = "frames";
};

/// Judges one raw response against an item.
EvalRecord make_record(const CellKey& cell, const QaItem& item, const SelectionManifest& manifest,
                       const QueryOutcome& outcome);

/// Queries every item once, in parallel up to options.concurrency, and
/// returns records in dataset order. A missing manifest is a ValidationError;
/// adapter and protocol failures abort the cell by propagating.
std::vector<EvalRecord> evaluate_cell(const CellKey& cell, const std::vector<QaItem>& items,
                                      const std::vector<SelectionManifest>& manifests,
                                      ModelAdapter& adapter, const HarnessOptions& options);

/// `<root>/<model>/<strategy>/<n_max>`
std::filesystem::path cell_dir(const std::filesystem::path& root, const CellKey& cell);

/// Writes report.csv, report.md and records.jsonl into cell_dir(root, cell).
void write_cell_outputs(const std::filesystem::path& root, const CellKey& cell,
                        const std::vector<EvalRecord>& records);

/// records.jsonl body: one compact JSON object per record, '\n' terminated.
std::string records_jsonl(const std::vector<EvalRecord>& records);

struct CellOutcome {
  CellKey cell;
  std::vector<EvalRecord> records;  // empty when failed
  std::optional<ErrorKind> error_kind;
  std::string error;
  std::vector<SampleFailure> sampling_failures;
  bool ok() const noexcept { return !error_kind; }
};

/// Throws ValidationError unless the grid is non-empty and strictly ascending.
void validate_grid(const std::vector<std::int64_t>& grid);

inline const std::vector<std::int64_t> kDefaultAblationGrid = {16, 64, 96, 256, 600};

/// Samples and evaluates one cell, then writes its outputs. Sampling failures
/// fail the cell because the dataset would be evaluated partially.
CellOutcome run_cell(const std::string& model, const std::string& dataset,
                     const std::vector<QaItem>& items, SamplingPlan& plan, std::int64_t n_max,
                     ModelAdapter& adapter, const HarnessOptions& options,
                     const std::filesystem::path& out_root);

/// run_cell for every grid point, reusing the plan's per-video candidates.
/// A failing cell is recorded and the remaining cells still run. Writes
/// `<root>/<model>/<strategy>/ablation.csv`.
std::vector<CellOutcome> run_ablation(const std::string& model, const std::string& dataset,
                                      const std::vector<QaItem>& items, SamplingPlan& plan,
                                      const std::vector<std::int64_t>& grid,
                                      ModelAdapter& adapter, const HarnessOptions& options,
                                      const std::filesystem::path& out_root);

/// ablation.csv body:
/// model,dataset,strategy,n_max,status,correct,total,accuracy,error
std::string ablation_csv(const std::vector<CellOutcome>& outcomes);

}  // namespace framepick::eval
