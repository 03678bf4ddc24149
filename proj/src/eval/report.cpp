#include "framepick/eval/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

namespace framepick::eval {

namespace {

// Column order of the comparison tables.
constexpr Strategy kTableOrder[] = {Strategy::SingleFirst, Strategy::SingleCenter,
                                    Strategy::UniformFps, Strategy::MaxInfo, Strategy::Scored};

struct Counts {
  std::int64_t correct = 0;
  std::int64_t total = 0;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

Strategy parse_strategy_or_label(const std::string& text) {
  for (Strategy s : kTableOrder) {
    if (text == strategy_name(s) || lower(text) == lower(strategy_label(s))) return s;
  }
  return parse_strategy(text);  // throws with the list of names
}

std::int64_t parse_count(const std::string& text, const std::string& where) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos ||
      text.size() > 18) {
    throw ValidationError(where + ": expected a non-negative integer, got '" + text + "'");
  }
  return std::stoll(text);
}

/// Exact decimal percent "64.85" -> 649 tenths, half up.
std::int64_t parse_percent_tenths(const std::string& text, const std::string& where) {
  const auto dot = text.find('.');
  const std::string whole = text.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  const auto digits = [](const std::string& s) {
    return s.find_first_not_of("0123456789") == std::string::npos;
  };
  if (whole.empty() || !digits(whole) || !digits(frac) || whole.size() > 3 ||
      (dot != std::string::npos && frac.empty())) {
    throw ValidationError(where + ": expected a percentage such as 64.9, got '" + text + "'");
  }
  std::int64_t tenths = std::stoll(whole) * 10;
  if (!frac.empty()) tenths += frac[0] - '0';
  if (frac.size() > 1 && frac[1] >= '5') ++tenths;
  if (tenths > 1000) throw ValidationError(where + ": percentage above 100");
  return tenths;
}

using RowKey = std::tuple<CellKey, bool, std::string>;

RowKey key_of(const AccuracyRow& r) { return {r.cell, !r.overall, r.task}; }

void sort_rows(std::vector<AccuracyRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const AccuracyRow& a, const AccuracyRow& b) { return key_of(a) < key_of(b); });
}

/// Table grouping key: dataset first.
using TableKey = std::tuple<std::string, std::string, std::int64_t, std::string>;

std::string table(const std::vector<AccuracyRow>& rows, bool by_task,
                  const std::map<std::tuple<std::string, std::string, Strategy>, std::int64_t>*
                      reported) {
  std::map<TableKey, std::map<Strategy, const AccuracyRow*>> grid;
  for (const AccuracyRow& r : rows) {
    if (r.overall == by_task) continue;
    grid[{r.cell.dataset, r.cell.model, r.cell.n_max, r.task}][r.cell.strategy] = &r;
  }
  std::string out = "| Dataset | Model | N_max |";
  if (by_task) out += " Task |";
  for (Strategy s : kTableOrder) out += ' ' + std::string(strategy_label(s)) + " |";
  out += "\n|---|---|---:|";
  if (by_task) out += "---|";
  for (std::size_t i = 0; i < std::size(kTableOrder); ++i) out += "---:|";
  out += '\n';
  for (const auto& [key, cells] : grid) {
    const auto& [dataset, model, n_max, task] = key;
    out += "| " + dataset + " | " + model + " | " + std::to_string(n_max) + " |";
    if (by_task) out += ' ' + task + " |";
    for (Strategy s : kTableOrder) {
      const auto it = cells.find(s);
      if (it == cells.end()) {
        out += " - |";
        continue;
      }
      const std::int64_t measured = accuracy_tenths(it->second->correct, it->second->total);
      out += ' ' + format_tenths(measured);
      if (reported) {
        const auto rep = reported->find({model, dataset, s});
        if (rep != reported->end()) {
          out += " (reported " + format_tenths(rep->second) + ", " +
                 format_delta_tenths(measured - rep->second) + ")";
        }
      }
      out += " |";
    }
    out += '\n';
  }
  return out;
}

std::map<std::tuple<std::string, std::string, Strategy>, std::int64_t> reported_map(
    const std::vector<ReportedScore>& reported) {
  std::map<std::tuple<std::string, std::string, Strategy>, std::int64_t> m;
  for (const ReportedScore& r : reported) m[{r.model, r.dataset, r.strategy}] = r.tenths;
  return m;
}

}  // namespace

std::vector<AccuracyRow> AccuracyReport::overall() const {
  std::vector<AccuracyRow> out;
  for (const auto& r : rows) {
    if (r.overall) out.push_back(r);
  }
  return out;
}

AccuracyReport aggregate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw ValidationError("no evaluation records to aggregate");
  std::map<CellKey, std::pair<Counts, std::map<std::string, Counts>>> cells;
  for (const EvalRecord& r : records) {
    auto& [overall, tasks] = cells[r.cell];
    const std::int64_t hit = r.correct ? 1 : 0;
    overall.correct += hit;
    ++overall.total;
    tasks[r.task_tag].correct += hit;
    ++tasks[r.task_tag].total;
  }
  AccuracyReport report;
  for (const auto& [cell, counts] : cells) {
    report.rows.push_back({cell, true, "", counts.first.correct, counts.first.total});
    for (const auto& [task, c] : counts.second) {
      report.rows.push_back({cell, false, task, c.correct, c.total});
    }
  }
  return report;
}

std::int64_t accuracy_tenths(std::int64_t correct, std::int64_t total) {
  if (total <= 0) throw ValidationError("accuracy of an empty set");
  return (2000 * correct + total) / (2 * total);
}

std::string format_tenths(std::int64_t tenths) {
  const std::int64_t a = tenths < 0 ? -tenths : tenths;
  return std::string(tenths < 0 ? "-" : "") + std::to_string(a / 10) + '.' +
         std::to_string(a % 10);
}

std::string format_delta_tenths(std::int64_t delta) {
  return (delta < 0 ? "" : "+") + format_tenths(delta);
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ValidationError("CSV: unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string report_csv(const AccuracyReport& report) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const AccuracyRow& r : report.rows) {
    char acc[32];
    std::snprintf(acc, sizeof(acc), "%.6f", r.accuracy());
    out += csv_field(r.cell.model) + ',' + csv_field(r.cell.dataset) + ',' +
           std::string(strategy_name(r.cell.strategy)) + ',' + std::to_string(r.cell.n_max) + ',' +
           (r.overall ? "overall" : "task") + ',' + csv_field(r.task) + ',' +
           std::to_string(r.correct) + ',' + std::to_string(r.total) + ',' + acc + '\n';
  }
  return out;
}

AccuracyReport parse_report_csv(std::string_view text, std::string_view source) {
  const auto records = parse_csv(text);
  const std::string src(source);
  if (records.empty()) throw ValidationError(src + ": empty report");
  std::string header;
  for (std::size_t i = 0; i < records[0].size(); ++i) header += (i ? "," : "") + records[0][i];
  if (header != kReportCsvHeader) {
    throw ValidationError(src + ": unexpected columns '" + header + "' (expected '" +
                          std::string(kReportCsvHeader) + "')");
  }
  AccuracyReport report;
  std::map<CellKey, std::pair<Counts, Counts>> sums;  // overall, sum of tasks
  std::map<CellKey, bool> has_tasks;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    const std::string where = src + " row " + std::to_string(i + 1);
    if (f.size() != 9) {
      throw ValidationError(where + ": expected 9 columns, got " + std::to_string(f.size()));
    }
    AccuracyRow row;
    row.cell.model = f[0];
    row.cell.dataset = f[1];
    try {
      row.cell.strategy = parse_strategy(f[2]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    row.cell.n_max = parse_count(f[3], where + " n_max");
    if (f[4] != "overall" && f[4] != "task") {
      throw ValidationError(where + ": scope must be 'overall' or 'task'");
    }
    row.overall = f[4] == "overall";
    row.task = f[5];
    if (row.overall && !row.task.empty()) throw ValidationError(where + ": overall row with a task");
    row.correct = parse_count(f[6], where + " correct");
    row.total = parse_count(f[7], where + " total");
    if (row.total == 0 || row.correct > row.total) {
      throw ValidationError(where + ": counts " + f[6] + "/" + f[7] + " are inconsistent");
    }
    char acc[32];
    std::snprintf(acc, sizeof(acc), "%.6f", row.accuracy());
    if (f[8] != acc) throw ValidationError(where + ": accuracy " + f[8] + " does not match counts");
    auto& [overall, tasks] = sums[row.cell];
    if (row.overall) {
      if (overall.total) throw ValidationError(where + ": second overall row for the cell");
      overall = {row.correct, row.total};
    } else {
      tasks.correct += row.correct;
      tasks.total += row.total;
      has_tasks[row.cell] = true;
    }
    report.rows.push_back(std::move(row));
  }
  for (const auto& [cell, s] : sums) {
    if (!s.first.total) throw ValidationError(src + ": no overall row for " + describe(cell));
    if (has_tasks[cell] && (s.first.correct != s.second.correct || s.first.total != s.second.total)) {
      throw ValidationError(src + ": task rows of " + describe(cell) +
                            " do not add up to the overall row");
    }
  }
  sort_rows(report.rows);
  return report;
}

std::string report_markdown(const AccuracyReport& report) {
  std::string out = "## Accuracy (%)\n\n";
  out += table(report.rows, false, nullptr);
  out += "\n## Accuracy by task (%)\n\n";
  out += table(report.rows, true, nullptr);
  return out;
}

std::vector<ReportedScore> parse_reported_csv(std::string_view text) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ValidationError("reported scores: empty file");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < records[0].size(); ++i) col[lower(trim(records[0][i]))] = i;
  for (const char* name : {"model", "dataset", "strategy", "accuracy"}) {
    if (!col.count(name)) {
      throw ValidationError(std::string("reported scores: missing column '") + name + "'");
    }
  }
  std::vector<ReportedScore> out;
  std::map<std::tuple<std::string, std::string, Strategy>, std::int64_t> seen;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    const std::string where = "reported scores row " + std::to_string(i + 1);
    if (f.size() != records[0].size()) throw ValidationError(where + ": wrong number of columns");
    ReportedScore r;
    r.model = trim(f[col["model"]]);
    r.dataset = trim(f[col["dataset"]]);
    try {
      r.strategy = parse_strategy_or_label(trim(f[col["strategy"]]));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    r.tenths = parse_percent_tenths(trim(f[col["accuracy"]]), where);
    const auto [it, inserted] = seen.emplace(std::tuple{r.model, r.dataset, r.strategy}, r.tenths);
    if (!inserted) {
      if (it->second != r.tenths) throw ValidationError(where + ": conflicting duplicate score");
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

AccuracyReport merge_reports(const std::vector<AccuracyReport>& reports) {
  std::map<RowKey, AccuracyRow> rows;
  for (const AccuracyReport& rep : reports) {
    for (const AccuracyRow& r : rep.rows) {
      const auto [it, inserted] = rows.emplace(key_of(r), r);
      if (!inserted && (it->second.correct != r.correct || it->second.total != r.total)) {
        throw ValidationError("conflicting results for " + describe(r.cell) +
                              (r.overall ? "" : " task '" + r.task + "'"));
      }
    }
  }
  AccuracyReport merged;
  for (auto& [key, row] : rows) merged.rows.push_back(std::move(row));
  return merged;
}

std::string comparison_csv(const AccuracyReport& merged,
                           const std::vector<ReportedScore>& reported) {
  const auto rep = reported_map(reported);
  std::string out = "model,dataset,n_max,strategy,correct,total,measured,reported,delta\n";
  std::vector<AccuracyRow> rows = merged.overall();
  std::sort(rows.begin(), rows.end(), [](const AccuracyRow& a, const AccuracyRow& b) {
    return std::tuple(a.cell.model, a.cell.dataset, a.cell.n_max, a.cell.strategy) <
           std::tuple(b.cell.model, b.cell.dataset, b.cell.n_max, b.cell.strategy);
  });
  for (const AccuracyRow& r : rows) {
    const std::int64_t measured = accuracy_tenths(r.correct, r.total);
    out += csv_field(r.cell.model) + ',' + csv_field(r.cell.dataset) + ',' +
           std::to_string(r.cell.n_max) + ',' + std::string(strategy_name(r.cell.strategy)) + ',' +
           std::to_string(r.correct) + ',' + std::to_string(r.total) + ',' +
           format_tenths(measured) + ',';
    const auto it = rep.find({r.cell.model, r.cell.dataset, r.cell.strategy});
    if (it != rep.end()) {
      out += format_tenths(it->second) + ',' + format_delta_tenths(measured - it->second);
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

std::string comparison_markdown(const AccuracyReport& merged,
                                const std::vector<ReportedScore>& reported) {
  const auto rep = reported_map(reported);
  std::string out = "## Measured accuracy (%)\n\n";
  out += table(merged.rows, false, reported.empty() ? nullptr : &rep);
  if (std::any_of(merged.rows.begin(), merged.rows.end(),
                  [](const AccuracyRow& r) { return !r.overall; })) {
    out += "\n## Measured accuracy by task (%)\n\n";
    out += table(merged.rows, true, nullptr);
  }
  return out;
}

}  // namespace framepick::eval
