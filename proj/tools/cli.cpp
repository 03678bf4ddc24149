#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "framepick/error.hpp"
#include "framepick/eval/adapter.hpp"
#include "framepick/eval/dataset.hpp"
#include "framepick/eval/harness.hpp"
#include "framepick/eval/mock.hpp"
#include "framepick/eval/report.hpp"
#include "framepick/manifest.hpp"
#include "framepick/sampling.hpp"
#include "framepick/subprocess.hpp"

namespace framepick::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigFile = "framepick.toml";
constexpr const char* kCacheEnv = "FRAMEPICK_CACHE_DIR";

struct SamplingFlags {
  std::string strategy;
  SamplingConfig cfg;
  std::vector<CLI::Option*> overrides;

  void add(CLI::App* app) {
    overrides = {
        app->add_option("--rate", cfg.rate_r, "Uniform-FPS rate r (frames per second)")
            ->capture_default_str(),
        app->add_option("--n-min", cfg.n_min, "Minimum frame count")->capture_default_str(),
        app->add_option("--n-max", cfg.n_max, "Maximum frame count (frame budget)")
            ->capture_default_str(),
        app->add_option("--pool", cfg.pool_n, "Candidate pool size for adaptive strategies")
            ->capture_default_str(),
        app->add_option("--fraction", cfg.score_fraction, "Top-score fraction kept by 'scored'")
            ->capture_default_str(),
        app->add_option("--svd-energy", cfg.svd_energy, "Spectral energy kept by the SVD")
            ->capture_default_str(),
        app->add_option("--maxvol-delta", cfg.maxvol_delta, "MaxVol convergence tolerance")
            ->capture_default_str(),
        app->add_option("--growth-delta", cfg.rect_growth_delta,
                        "Rectangular MaxVol growth tolerance")
            ->capture_default_str(),
        app->add_option("--cap-factor", cfg.rect_cap_factor,
                        "Rectangular MaxVol keeps at most cap-factor * rank rows")
            ->capture_default_str(),
    };
  }

  bool any_override() const {
    return std::any_of(overrides.begin(), overrides.end(),
                       [](const CLI::Option* o) { return o->count() > 0; });
  }

  SamplingConfig config() const {
    SamplingConfig c = cfg;
    c.strategy = parse_strategy(strategy);
    c.validate();
    return c;
  }
};

void report_failures(const std::vector<SampleFailure>& failures, std::ostream& err) {
  if (failures.empty()) return;
  err << failures.size() << " video(s) failed:\n";
  for (const auto& f : failures) err << "  " << f.video_id << ": " << f.message << '\n';
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  if (text == "default") return eval::kDefaultAblationGrid;
  std::vector<std::int64_t> grid;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos ||
        item.size() > 9) {
      throw ValidationError("--ablate: '" + item + "' is not a frame count");
    }
    grid.push_back(std::stoll(item));
    pos = end + 1;
  }
  eval::validate_grid(grid);
  return grid;
}

int cmd_sample(const SamplingFlags& flags, const std::string& videos, const std::string& femb_dir,
               const std::string& out_dir, std::size_t jobs, std::ostream& out,
               std::ostream& err) {
  const SamplingConfig cfg = flags.config();
  if (is_adaptive(cfg.strategy) && femb_dir.empty()) {
    throw ConfigError("--strategy " + flags.strategy + " requires --femb-dir");
  }
  SamplingPlan plan(load_video_list(videos), cfg, femb_dir, jobs);
  const SampleBatch batch = plan.manifests();
  ensure_dir(out_dir);
  for (const auto& m : batch.manifests) {
    write_manifest_file(manifest_path(out_dir, m.video_id()), m);
  }
  std::size_t fallbacks = 0;
  for (const auto& m : batch.manifests) fallbacks += m.fallback() ? 1 : 0;
  out << "wrote " << batch.manifests.size() << " manifest(s) to " << out_dir;
  if (fallbacks) out << " (" << fallbacks << " fell back to uniform-FPS)";
  out << '\n';
  report_failures(batch.failures, err);
  if (!batch.failures.empty()) return exit_code_for(batch.failures.front().kind);
  return kExitOk;
}

struct EvaluateFlags {
  std::string dataset;
  std::string dataset_name;
  std::string manifests;
  std::string videos;
  std::string femb_dir;
  std::string adapter_cmd;
  std::string mock;
  std::string out;
  std::string model;
  std::string ablate;
  std::size_t concurrency = 4;
  double timeout_s = 120.0;
  std::string decoder_cmd;
  std::string frames_dir;
  std::size_t jobs = 1;
};

std::string default_model_name(const EvaluateFlags& f) {
  if (!f.mock.empty()) return "mock";
  const auto argv = split_command(f.adapter_cmd);
  if (argv.empty()) throw ConfigError("--adapter-cmd is empty");
  return fs::path(argv.front()).filename().string();
}

void print_cell(const eval::CellOutcome& o, const fs::path& root, std::ostream& out,
                std::ostream& err) {
  if (!o.ok()) {
    err << "cell " << eval::describe(o.cell) << " failed: " << o.error << '\n';
    return;
  }
  std::int64_t correct = 0;
  for (const auto& r : o.records) correct += r.correct ? 1 : 0;
  char acc[32];
  std::snprintf(acc, sizeof(acc), "%.6f",
                static_cast<double>(correct) / static_cast<double>(o.records.size()));
  out << eval::describe(o.cell) << ": " << correct << '/' << o.records.size() << " = " << acc
      << " -> " << eval::cell_dir(root, o.cell).string() << '\n';
}

int cmd_evaluate(const EvaluateFlags& f, const SamplingFlags& sflags, std::ostream& out,
                 std::ostream& err) {
  const auto items = eval::load_dataset(f.dataset);
  if (items.empty()) throw ValidationError(f.dataset + ": dataset has no items");
  const std::string dataset_name =
      f.dataset_name.empty() ? fs::path(f.dataset).stem().string() : f.dataset_name;
  const std::string model = f.model.empty() ? default_model_name(f) : f.model;

  eval::HarnessOptions options;
  options.concurrency = std::max<std::size_t>(1, f.concurrency);
  if (!(f.timeout_s > 0)) throw ConfigError("--timeout must be positive");
  options.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(f.timeout_s * 1000.0));
  options.frames_dir = f.frames_dir.empty() ? fs::path(f.out) / "frames" : fs::path(f.frames_dir);
  if (!f.decoder_cmd.empty()) {
    validate_decoder_template(f.decoder_cmd);
    options.decoder = DecoderConfig{f.decoder_cmd, options.frames_dir, f.jobs};
  }
  const std::optional<std::vector<std::int64_t>> grid =
      f.ablate.empty() ? std::nullopt : std::optional(parse_grid(f.ablate));

  // Inputs first, then the adapter, so a bad adapter command fails before
  // any sampling work but after cheap validation.
  std::optional<std::vector<SelectionManifest>> given;
  std::optional<SamplingPlan> plan;
  if (!f.manifests.empty()) {
    if (!f.videos.empty() || !sflags.strategy.empty() || sflags.any_override()) {
      throw ConfigError("--manifests cannot be combined with --videos, --strategy or sampling overrides");
    }
    given = read_manifest_dir(f.manifests);
    if (given->empty()) throw ValidationError("no manifests in '" + f.manifests + "'");
    for (const auto& m : *given) {
      if (!(m.config() == given->front().config())) {
        throw ValidationError("manifests in '" + f.manifests +
                              "' were sampled with different settings ('" +
                              given->front().video_id() + "' vs '" + m.video_id() + "')");
      }
    }
    if (grid) {
      std::vector<VideoMeta> metas;
      for (const auto& m : *given) metas.push_back(m.meta());
      plan.emplace(std::move(metas), given->front().config(), f.femb_dir, f.jobs);
    }
  } else {
    if (f.videos.empty() || sflags.strategy.empty()) {
      throw ConfigError("evaluate needs --manifests, or --videos with --strategy");
    }
    const SamplingConfig cfg = sflags.config();
    if (is_adaptive(cfg.strategy) && f.femb_dir.empty()) {
      throw ConfigError("--strategy " + sflags.strategy + " requires --femb-dir");
    }
    plan.emplace(load_video_list(f.videos), cfg, f.femb_dir, f.jobs);
  }

  std::unique_ptr<eval::ModelAdapter> adapter;
  if (!f.mock.empty()) {
    adapter = eval::make_builtin_mock(f.mock, items);
  } else {
    adapter = std::make_unique<eval::ProcessAdapter>(f.adapter_cmd, options.concurrency);
  }

  const fs::path root = f.out;
  if (grid) {
    const auto outcomes =
        eval::run_ablation(model, dataset_name, items, *plan, *grid, *adapter, options, root);
    std::optional<ErrorKind> first_error;
    for (const auto& o : outcomes) {
      print_cell(o, root, out, err);
      if (!o.ok() && !first_error) first_error = o.error_kind;
    }
    out << "ablation table -> "
        << (root / model / std::string(strategy_name(plan->config().strategy)) / "ablation.csv")
               .string()
        << '\n';
    return first_error ? exit_code_for(*first_error) : kExitOk;
  }
  if (given) {
    const SamplingConfig& cfg = given->front().config();
    const eval::CellKey cell{model, dataset_name, cfg.strategy, cfg.n_max};
    eval::CellOutcome o;
    o.cell = cell;
    o.records = eval::evaluate_cell(cell, items, *given, *adapter, options);
    eval::write_cell_outputs(root, cell, o.records);
    print_cell(o, root, out, err);
    return kExitOk;
  }
  const auto o = eval::run_cell(model, dataset_name, items, *plan, plan->config().n_max, *adapter,
                                options, root);
  report_failures(o.sampling_failures, err);
  print_cell(o, root, out, err);
  if (!o.ok()) throw Error(*o.error_kind, o.error);
  return kExitOk;
}

std::vector<fs::path> collect_runs(const std::vector<std::string>& runs) {
  std::vector<fs::path> files;
  for (const auto& r : runs) {
    const fs::path p = r;
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p, ec)) {
        if (e.is_regular_file() && e.path().filename() == "report.csv") found.push_back(e.path());
      }
      if (ec) throw IoError("cannot scan '" + p.string() + "': " + ec.message());
      std::sort(found.begin(), found.end());
      if (found.empty()) throw ValidationError("no report.csv under '" + p.string() + "'");
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& reported_path,
               const std::string& out_dir, std::ostream& out) {
  if (runs.empty()) throw ConfigError("report needs at least one --runs file");
  std::vector<eval::AccuracyReport> reports;
  for (const auto& file : collect_runs(runs)) {
    reports.push_back(eval::parse_report_csv(read_text_file(file), file.string()));
  }
  const auto merged = eval::merge_reports(reports);
  std::vector<eval::ReportedScore> reported;
  if (!reported_path.empty()) reported = eval::parse_reported_csv(read_text_file(reported_path));
  ensure_dir(out_dir);
  write_text_file(fs::path(out_dir) / "comparison.csv", eval::comparison_csv(merged, reported));
  write_text_file(fs::path(out_dir) / "comparison.md",
                  eval::comparison_markdown(merged, reported));
  out << "merged " << reports.size() << " report(s) -> "
      << (fs::path(out_dir) / "comparison.csv").string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frame sampling and video QA evaluation", "framepick"};
  app.set_config("--config", kConfigFile, "Key/value config file; flags take precedence");
  app.require_subcommand(1);

  SamplingFlags sample_flags;
  std::string s_videos, s_femb, s_out;
  std::size_t s_jobs = 1;
  CLI::App* sample = app.add_subcommand("sample", "Write one selection manifest per video");
  sample->add_option("--strategy", sample_flags.strategy, "fps, first, center, maxinfo or scored")
      ->required();
  sample->add_option("--videos", s_videos, "Video list (JSON lines)")->required();
  sample->add_option("--femb-dir", s_femb, "Directory of <video_id>.femb inputs");
  sample->add_option("--out", s_out, "Output directory for manifests")->required();
  sample->add_option("--jobs", s_jobs, "Videos sampled in parallel")->capture_default_str();
  sample_flags.add(sample);

  EvaluateFlags ef;
  SamplingFlags eval_flags;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Query a model and write accuracy reports");
  evaluate->add_option("--dataset", ef.dataset, "QA dataset (JSON lines)")->required();
  evaluate->add_option("--dataset-name", ef.dataset_name, "Name used in reports (default: file stem)");
  evaluate->add_option("--manifests", ef.manifests, "Directory of selection manifests");
  evaluate->add_option("--videos", ef.videos, "Video list to sample on the fly");
  evaluate->add_option("--strategy", eval_flags.strategy, "Strategy when sampling on the fly");
  evaluate->add_option("--femb-dir", ef.femb_dir, "FEMB inputs for adaptive strategies");
  auto* adapter_opt =
      evaluate->add_option("--adapter-cmd", ef.adapter_cmd, "Adapter program speaking the wire protocol");
  auto* mock_opt = evaluate->add_option(
      "--mock", ef.mock, "Built-in adapter: constant:X, hash, oracle or oracle-min:K");
  adapter_opt->excludes(mock_opt);
  evaluate->add_option("--out", ef.out, "Output root")->required();
  evaluate->add_option("--model", ef.model, "Model name used in reports and paths");
  evaluate->add_option("--ablate", ef.ablate,
                       "Comma-separated n_max grid, or 'default' for 16,64,96,256,600");
  evaluate->add_option("--concurrency", ef.concurrency, "Requests in flight")->capture_default_str();
  evaluate->add_option("--timeout", ef.timeout_s, "Per-request timeout in seconds")
      ->capture_default_str();
  evaluate->add_option("--decoder-cmd", ef.decoder_cmd,
                       "Frame decoder template with {video}, {index} and {out}");
  evaluate->add_option("--frames-dir", ef.frames_dir, "Frame image cache (default: <out>/frames)")
      ->envname(kCacheEnv);
  evaluate->add_option("--jobs", ef.jobs, "Parallel sampling and decoding jobs")
      ->capture_default_str();
  eval_flags.add(evaluate);

  std::vector<std::string> runs;
  std::string reported, r_out;
  CLI::App* report = app.add_subcommand("report", "Merge report.csv files into comparison tables");
  report->add_option("--runs", runs, "report.csv files or directories to scan")->required();
  report->add_option("--reported", reported, "Literature scores: model,dataset,strategy,accuracy");
  report->add_option("--out", r_out, "Output directory")->required();

  std::vector<const char*> argv{"framepick"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : {sample, evaluate, report}) {
      if (*sub) target = sub;
    }
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*sample) return cmd_sample(sample_flags, s_videos, s_femb, s_out, s_jobs, out, err);
    if (*evaluate) {
      if (ef.adapter_cmd.empty() && ef.mock.empty()) {
        throw ConfigError("evaluate needs --adapter-cmd or --mock");
      }
      return cmd_evaluate(ef, eval_flags, out, err);
    }
    return cmd_report(runs, reported, r_out, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace framepick::cli
