#include "framepick/eval/harness.hpp"

#include <cstdio>
#include <set>

#include <json.hpp>

#include "framepick/eval/prompt.hpp"
#include "framepick/eval/report.hpp"
#include "framepick/manifest.hpp"
#include "framepick/parallel.hpp"

namespace framepick::eval {

namespace {

using ordered_json = nlohmann::ordered_json;

void require_path_component(std::string_view what, const std::string& value) {
  if (value.empty() || value == "." || value == ".." ||
      value.find_first_of("/\\") != std::string::npos) {
    throw ValidationError(std::string(what) + " '" + value + "' cannot be used as a directory name");
  }
}

}  // namespace

std::string describe(const CellKey& cell) {
  return cell.model + " / " + cell.dataset + " / " + std::string(strategy_name(cell.strategy)) +
         " / n_max=" + std::to_string(cell.n_max);
}

std::string_view to_string(RecordCause cause) noexcept {
  switch (cause) {
    case RecordCause::Ok: return "ok";
    case RecordCause::Unparsed: return "unparsed";
    case RecordCause::Timeout: return "timeout";
  }
  return "ok";
}

EvalRecord make_record(const CellKey& cell, const QaItem& item, const SelectionManifest& manifest,
                       const QueryOutcome& outcome) {
  EvalRecord r;
  r.cell = cell;
  r.item_id = item.item_id;
  r.video_id = item.video_id;
  r.task_tag = item.task_tag;
  r.frame_indices = manifest.frame_indices();
  r.answer_label = item.answer_label;
  if (outcome.timed_out) {
    r.cause = RecordCause::Timeout;
    return r;
  }
  r.raw_response = outcome.text;
  r.parsed_label = parse_answer(outcome.text, item.option_count());
  r.cause = r.parsed_label ? RecordCause::Ok : RecordCause::Unparsed;
  r.correct = r.parsed_label == item.answer_label;
  return r;
}

std::vector<EvalRecord> evaluate_cell(const CellKey& cell, const std::vector<QaItem>& items,
                                      const std::vector<SelectionManifest>& manifests,
                                      ModelAdapter& adapter, const HarnessOptions& options) {
  std::map<std::string, const SelectionManifest*> by_video;
  for (const auto& m : manifests) by_video.emplace(m.video_id(), &m);

  // Resolve frames once per video, before any query is sent.
  std::map<std::string, std::vector<std::string>> images;
  for (const QaItem& item : items) {
    if (images.count(item.video_id)) continue;
    const auto it = by_video.find(item.video_id);
    if (it == by_video.end()) {
      throw ValidationError("no selection manifest for video '" + item.video_id +
                            "' (item '" + item.item_id + "')");
    }
    const SelectionManifest& m = *it->second;
    std::vector<std::string> paths;
    if (options.decoder) {
      for (const auto& p : extract_frames(m.meta(), m.frame_indices(), *options.decoder)) {
        paths.push_back(p.string());
      }
    } else {
      for (const FrameIndex idx : m.frame_indices()) {
        paths.push_back(frame_image_path(options.frames_dir, m.video_id(), idx).string());
      }
    }
    images.emplace(item.video_id, std::move(paths));
  }

  std::vector<EvalRecord> records(items.size());
  parallel_for(items.size(), options.concurrency, [&](std::size_t i) {
    const QaItem& item = items[i];
    const QueryOutcome outcome =
        adapter.query(build_prompt(item), images.at(item.video_id), options.timeout);
    records[i] = make_record(cell, item, *by_video.at(item.video_id), outcome);
  });
  return records;
}

std::filesystem::path cell_dir(const std::filesystem::path& root, const CellKey& cell) {
  require_path_component("model name", cell.model);
  return root / cell.model / std::string(strategy_name(cell.strategy)) / std::to_string(cell.n_max);
}

std::string records_jsonl(const std::vector<EvalRecord>& records) {
  std::string out;
  for (const EvalRecord& r : records) {
    ordered_json doc;
    doc["model"] = r.cell.model;
    doc["dataset"] = r.cell.dataset;
    doc["strategy"] = strategy_name(r.cell.strategy);
    doc["n_max"] = r.cell.n_max;
    doc["item_id"] = r.item_id;
    doc["video_id"] = r.video_id;
    doc["task_tag"] = r.task_tag;
    doc["frame_indices"] = r.frame_indices;
    doc["raw_response"] = r.raw_response;
    doc["parsed_label"] = r.parsed_label ? ordered_json(std::string(1, *r.parsed_label)) : nullptr;
    doc["answer_label"] = std::string(1, r.answer_label);
    doc["correct"] = r.correct;
    doc["cause"] = to_string(r.cause);
    out += doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void write_cell_outputs(const std::filesystem::path& root, const CellKey& cell,
                        const std::vector<EvalRecord>& records) {
  const AccuracyReport report = aggregate(records);
  const auto dir = cell_dir(root, cell);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "report.csv", report_csv(report));
  write_text_file(dir / "report.md", report_markdown(report));
  write_text_file(dir / "records.jsonl", records_jsonl(records));
}

void validate_grid(const std::vector<std::int64_t>& grid) {
  if (grid.empty()) throw ValidationError("the n_max grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ValidationError("n_max grid values must be >= 1");
    if (i > 0 && grid[i] == grid[i - 1]) {
      throw ValidationError("duplicate n_max " + std::to_string(grid[i]) + " in grid");
    }
    if (i > 0 && grid[i] < grid[i - 1]) throw ValidationError("the n_max grid must be ascending");
  }
}

CellOutcome run_cell(const std::string& model, const std::string& dataset,
                     const std::vector<QaItem>& items, SamplingPlan& plan, std::int64_t n_max,
                     ModelAdapter& adapter, const HarnessOptions& options,
                     const std::filesystem::path& out_root) {
  CellOutcome outcome;
  outcome.cell = {model, dataset, plan.config().strategy, n_max};
  try {
    SampleBatch batch = plan.manifests_for(n_max);
    outcome.sampling_failures = batch.failures;
    std::set<std::string> needed;
    for (const QaItem& item : items) needed.insert(item.video_id);
    for (const SampleFailure& f : batch.failures) {
      if (needed.count(f.video_id)) {
        throw Error(f.kind, "sampling failed for video '" + f.video_id + "': " + f.message);
      }
    }
    outcome.records = evaluate_cell(outcome.cell, items, batch.manifests, adapter, options);
    write_cell_outputs(out_root, outcome.cell, outcome.records);
  } catch (const Error& e) {
    outcome.records.clear();
    outcome.error_kind = e.kind();
    outcome.error = e.what();
  }
  return outcome;
}

std::vector<CellOutcome> run_ablation(const std::string& model, const std::string& dataset,
                                      const std::vector<QaItem>& items, SamplingPlan& plan,
                                      const std::vector<std::int64_t>& grid,
                                      ModelAdapter& adapter, const HarnessOptions& options,
                                      const std::filesystem::path& out_root) {
  validate_grid(grid);
  std::vector<CellOutcome> outcomes;
  for (const std::int64_t n_max : grid) {
    outcomes.push_back(run_cell(model, dataset, items, plan, n_max, adapter, options, out_root));
  }
  require_path_component("model name", model);
  const auto dir = out_root / model / std::string(strategy_name(plan.config().strategy));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "ablation.csv", ablation_csv(outcomes));
  return outcomes;
}

std::string ablation_csv(const std::vector<CellOutcome>& outcomes) {
  std::string out = "model,dataset,strategy,n_max,status,correct,total,accuracy,error\n";
  for (const CellOutcome& o : outcomes) {
    out += csv_field(o.cell.model) + ',' + csv_field(o.cell.dataset) + ',' +
           std::string(strategy_name(o.cell.strategy)) + ',' + std::to_string(o.cell.n_max) + ',';
    if (o.ok()) {
      std::int64_t correct = 0;
      for (const EvalRecord& r : o.records) correct += r.correct ? 1 : 0;
      const auto total = static_cast<std::int64_t>(o.records.size());
      char acc[32];
      std::snprintf(acc, sizeof(acc), "%.6f",
                    total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0);
      out += "ok," + std::to_string(correct) + ',' + std::to_string(total) + ',' + acc + ",\n";
    } else {
      out += "failed,,,," + csv_field(o.error) + '\n';
    }
  }
  return out;
}

}  // namespace framepick::eval
