#include "lcbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "lcbench/keyed_text.hpp"
#include "lcbench/metrics.hpp"
#include "lcbench/serialize.hpp"
#include "lcbench/stats.hpp"
#include "lcbench/telemetry.hpp"
#include "lcbench/text.hpp"

namespace lcbench {
namespace {

const std::vector<std::string> kFieldOrder = {"E_train", "E_load",      "E_infer", "T_put", "ttft_ms",
                                              "ttft_p95_ms", "itl_ms", "itl_p95_ms", "M_vram", "S_task",
                                              "N_break", "IPW",      "rho_sys", "C_tax"};
const std::vector<std::string> kStatNames = {"mean", "median", "std", "q25", "q75"};

std::vector<RunAggregate> Sorted(const std::vector<RunAggregate>& aggregates) {
  std::vector<RunAggregate> out = aggregates;
  std::stable_sort(out.begin(), out.end(),
                   [](const RunAggregate& a, const RunAggregate& b) { return a.config.key() < b.config.key(); });
  return out;
}

std::optional<double> Median(const RunAggregate& a, std::string_view field) {
  if (const auto* s = a.find(field)) return s->median;
  return std::nullopt;
}

std::optional<double> MeanOf(const std::vector<std::optional<double>>& xs) {
  if (xs.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& x : xs) {
    if (!x) return std::nullopt;
    sum += *x;
  }
  return sum / static_cast<double>(xs.size());
}

std::string Cell(const std::optional<double>& v, int decimals, std::string_view suffix = "") {
  if (!v) return "-";
  return FormatFixed(*v, decimals) + std::string(suffix);
}

std::string Score(double mean, double sd) { return FormatFixed(mean, 2) + " ± " + FormatFixed(sd, 2); }

class MarkdownTable {
 public:
  MarkdownTable(std::string_view title, std::vector<std::string> header) : header_(std::move(header)) {
    out_ << "## " << title << "\n\n";
    row(header_);
    out_ << "|";
    for (std::size_t i = 0; i < header_.size(); ++i) out_ << (i < 2 ? " --- |" : " ---: |");
    out_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    out_ << "|";
    for (const auto& c : cells) out_ << " " << c << " |";
    out_ << "\n";
  }
  std::string str() { return out_.str() + "\n"; }

 private:
  std::vector<std::string> header_;
  std::ostringstream out_;
};

std::string EmitMarkdown(const ReportTables& t) {
  std::string out = "# Lifecycle efficiency report\n\n";

  MarkdownTable dep(kDeploymentTitle, {"Family", "Size", "N_break (requests)", "IPW", "rho_sys (tok/s/GB)",
                                       "Q_ret", "C_tax"});
  for (const auto& r : t.deployment) {
    dep.row({std::string(ToString(r.family)), std::string(ToString(r.tier)),
             r.never ? "never" : (r.N_break ? std::to_string(static_cast<long long>(std::ceil(*r.N_break))) : "-"),
             Cell(r.IPW, 2), Cell(r.rho_sys, 1), r.Q_ret ? FormatPercent(*r.Q_ret) : "-", Cell(r.C_tax, 1, "×")});
  }
  out += dep.str();

  MarkdownTable ad(kAdaptationTitle, {"Family", "Size", "Task", "Method", "Median Energy (kWh)", "Ratio"});
  for (const auto& r : t.adaptation_energy) {
    ad.row({std::string(ToString(r.config.family)), std::string(ToString(r.config.tier)),
            std::string(ToString(r.config.task)), std::string(ToString(r.config.adaptation)),
            FormatEnergyWithIqr(r.E_train), r.ratio ? FormatRatio(*r.ratio, 1) : "-"});
  }
  out += ad.str();

  MarkdownTable inf(kInferenceTitle,
                    {"Family", "Size", "Task", "Precision", "Throughput (tok/s)", "Speedup", "Energy/req", "Savings"});
  for (const auto& r : t.inference) {
    const std::string f(ToString(r.fp16.family)), p(ToString(r.fp16.tier)), k(ToString(r.fp16.task));
    inf.row({f, p, k, "FP16", FormatFixed(r.T_fp16, 1), FormatRatio(1.0, 2), FormatFixed(r.E_fp16, 3) + " J", "-"});
    inf.row({f, p, k, "INT4", FormatFixed(r.T_int4, 1), FormatRatio(r.speedup, 2), FormatFixed(r.E_int4, 3) + " J",
             FormatPercent(r.savings)});
  }
  out += inf.str();

  MarkdownTable rob(kRobustnessTitle, {"Family", "Task", "FP16 Score", "INT4 Score", "Retention", "STD Δ"});
  for (const auto& r : t.robustness) {
    rob.row({std::string(ToString(r.family)), std::string(ToString(r.task)),
             Score(r.pooled.S_FP16, r.pooled.std_FP16), Score(r.pooled.S_INT4, r.pooled.std_INT4),
             FormatPercent(r.retention), r.std_delta ? FormatPercent(*r.std_delta, true) : "-"});
  }
  out += rob.str();

  MarkdownTable tq(kTaskQualityTitle, {"Task", "Family", "Size", "FP16", "INT4", "Retention"});
  for (const auto& r : t.task_quality) {
    tq.row({std::string(ToString(r.fp16.task)), std::string(ToString(r.fp16.family)),
            std::string(ToString(r.fp16.tier)), Score(r.scores.S_FP16, r.scores.std_FP16),
            Score(r.scores.S_INT4, r.scores.std_INT4), FormatPercent(r.retention)});
  }
  out += tq.str();
  return out;
}

Json OptionalJson(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string EmitJson(const std::vector<RunAggregate>& aggs, const ReportTables& t) {
  Json doc;
  doc["schema"] = "lcbench.Report";
  doc["version"] = 1;
  doc["aggregates"] = aggs;
  Json& tables = doc["tables"];
  tables["deployment"] = Json::array();
  for (const auto& r : t.deployment) {
    Json n_break = r.never ? Json("never") : OptionalJson(r.N_break);
    tables["deployment"].push_back({{"family", ToString(r.family)},
                                    {"tier", ToString(r.tier)},
                                    {"N_break", n_break},
                                    {"IPW", OptionalJson(r.IPW)},
                                    {"rho_sys", OptionalJson(r.rho_sys)},
                                    {"Q_ret", OptionalJson(r.Q_ret)},
                                    {"C_tax", OptionalJson(r.C_tax)}});
  }
  tables["adaptation_energy"] = Json::array();
  for (const auto& r : t.adaptation_energy) {
    tables["adaptation_energy"].push_back(
        {{"config_id", r.config.id()}, {"E_train_kwh", r.E_train}, {"ratio", OptionalJson(r.ratio)}});
  }
  tables["inference"] = Json::array();
  for (const auto& r : t.inference) {
    tables["inference"].push_back({{"fp16", r.fp16.id()},
                                   {"int4", r.int4.id()},
                                   {"T_put_fp16", r.T_fp16},
                                   {"T_put_int4", r.T_int4},
                                   {"E_infer_fp16", r.E_fp16},
                                   {"E_infer_int4", r.E_int4},
                                   {"speedup", r.speedup},
                                   {"energy_savings_pct", r.savings}});
  }
  tables["robustness"] = Json::array();
  for (const auto& r : t.robustness) {
    tables["robustness"].push_back({{"family", ToString(r.family)},
                                    {"task", ToString(r.task)},
                                    {"scores", r.pooled},
                                    {"retention_pct", r.retention},
                                    {"std_delta_pct", OptionalJson(r.std_delta)}});
  }
  tables["task_quality"] = Json::array();
  for (const auto& r : t.task_quality) {
    tables["task_quality"].push_back(
        {{"fp16", r.fp16.id()}, {"int4", r.int4.id()}, {"scores", r.scores}, {"retention_pct", r.retention}});
  }
  return doc.dump(2) + "\n";
}

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error("unterminated quoted csv cell");
  cells.push_back(std::move(cur));
  return cells;
}

std::vector<std::string> FieldUnion(const std::vector<RunAggregate>& aggs) {
  std::vector<std::string> extra;
  std::set<std::string> present;
  for (const auto& a : aggs) {
    for (const auto& f : a.fields) {
      present.insert(f.field);
      if (std::find(kFieldOrder.begin(), kFieldOrder.end(), f.field) == kFieldOrder.end() &&
          std::find(extra.begin(), extra.end(), f.field) == extra.end()) {
        extra.push_back(f.field);
      }
    }
  }
  std::vector<std::string> out;
  for (const auto& f : kFieldOrder) {
    if (present.count(f)) out.push_back(f);
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::string EmitCsv(const std::vector<RunAggregate>& aggs) {
  const auto fields = FieldUnion(aggs);
  std::string out = "config_id,family,tier,task,adaptation,precision,model_id,n_runs";
  for (const auto& f : fields) {
    for (const auto& s : kStatNames) out += "," + f + "_" + s;
  }
  out += "\n";
  for (const auto& a : aggs) {
    out += CsvEscape(a.config.id());
    out += "," + std::string(ToString(a.config.family)) + "," + std::string(ToString(a.config.tier)) + "," +
           std::string(ToString(a.config.task)) + "," + std::string(ToString(a.config.adaptation)) + "," +
           std::string(ToString(a.config.precision_at_inference())) + "," + CsvEscape(a.config.model_id) + "," +
           std::to_string(a.n_runs);
    for (const auto& f : fields) {
      const auto* s = a.find(f);
      for (double v : {s ? s->mean : 0.0, s ? s->median : 0.0, s ? s->std : 0.0, s ? s->q25 : 0.0,
                       s ? s->q75 : 0.0}) {
        out += ",";
        if (s) out += FormatShortest(v);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view s) {
  if (s == "markdown" || s == "markdown-table" || s == "md") return ReportFormat::Markdown;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw Error("unknown report format '" + std::string(s) + "'");
}

std::string FormatEnergyWithIqr(const FieldStats& kwh) {
  return FormatFixed(kwh.median, 3) + " [" + FormatFixed(kwh.q25, 3) + "-" + FormatFixed(kwh.q75, 3) + "]";
}

std::string FormatRatio(double r, int decimals) { return FormatFixed(r, decimals) + "×"; }

std::string FormatPercent(double pct, bool sign) {
  std::string s = FormatFixed(pct, 1);
  if (sign && s.front() != '-') s = "+" + s;
  return s + "%";
}

ReportTables BuildReportTables(const std::vector<RunAggregate>& input) {
  const auto aggs = Sorted(input);
  ReportTables t;
  const auto pairs = PairByPrecision(aggs);

  // Deployment metrics per family/size.
  std::map<std::pair<Family, Tier>, std::vector<const RunAggregate*>> by_model;
  for (const auto& a : aggs) by_model[{a.config.family, a.config.tier}].push_back(&a);
  for (const auto& [key, group] : by_model) {
    std::vector<const RunAggregate*> pool;
    for (const auto* a : group) {
      if (a->config.precision_at_inference() == Precision::INT4) pool.push_back(a);
    }
    if (pool.empty()) pool = group;
    DeploymentRow row;
    row.family = key.first;
    row.tier = key.second;
    std::vector<std::optional<double>> n, ipw, rho, tax;
    for (const auto* a : pool) {
      n.push_back(Median(*a, "N_break"));
      ipw.push_back(Median(*a, "IPW"));
      rho.push_back(Median(*a, "rho_sys"));
      tax.push_back(Median(*a, "C_tax"));
    }
    row.IPW = MeanOf(ipw);
    row.rho_sys = MeanOf(rho);
    row.C_tax = MeanOf(tax);
    row.N_break = MeanOf(n);
    // Metrics present but N_break absent: some run never breaks even.
    row.never = !row.N_break && row.IPW.has_value();
    std::vector<PrecisionScorePair> scored;
    for (const auto& p : pairs) {
      if (p.fp16->config.family == key.first && p.fp16->config.tier == key.second) {
        const auto sp = ScorePair(p);
        if (sp.S_FP16 != 0.0) scored.push_back(sp);
      }
    }
    if (!scored.empty()) row.Q_ret = PooledRetention(scored);
    t.deployment.push_back(row);
  }

  // Adaptation energy with ratio against LoRA-FP16.
  std::map<std::tuple<Family, Tier, Task>, double> fp16_train;
  for (const auto& a : aggs) {
    if (a.config.adaptation == Adaptation::LoRA_FP16) {
      if (const auto* s = a.find("E_train")) fp16_train[{a.config.family, a.config.tier, a.config.task}] = s->median;
    }
  }
  for (const auto& a : aggs) {
    const auto* s = a.find("E_train");
    if (!s) continue;
    AdaptationEnergyRow row{a.config, *s, std::nullopt};
    if (auto it = fp16_train.find({a.config.family, a.config.tier, a.config.task});
        it != fp16_train.end() && it->second > 0) {
      row.ratio = s->median / it->second;
    }
    t.adaptation_energy.push_back(row);
  }

  // Inference efficiency and task quality per FP16/INT4 pair.
  std::map<std::pair<Family, Task>, std::vector<PrecisionScorePair>> robustness;
  for (const auto& p : pairs) {
    const auto T16 = Median(*p.fp16, "T_put"), T4 = Median(*p.int4, "T_put");
    const auto E16 = Median(*p.fp16, "E_infer"), E4 = Median(*p.int4, "E_infer");
    if (T16 && T4 && E16 && E4 && *T16 > 0 && *E16 > 0) {
      InferenceRow row{p.fp16->config, p.int4->config, *T16, *T4, *E16, *E4};
      row.speedup = *T4 / *T16;
      row.savings = (1.0 - *E4 / *E16) * 100.0;
      t.inference.push_back(row);
    }
    if (p.fp16->find("S_task") && p.int4->find("S_task")) {
      const auto sp = ScorePair(p);
      if (sp.S_FP16 == 0.0) continue;
      t.task_quality.push_back({p.fp16->config, p.int4->config, sp, QuantizationFidelity(sp)});
      robustness[{p.fp16->config.family, p.fp16->config.task}].push_back(sp);
    }
  }
  std::stable_sort(t.task_quality.begin(), t.task_quality.end(), [](const auto& a, const auto& b) {
    return std::tie(a.fp16.task, a.fp16.family, a.fp16.tier) < std::tie(b.fp16.task, b.fp16.family, b.fp16.tier);
  });
  for (const auto& [key, sps] : robustness) {
    RobustnessRow row;
    row.family = key.first;
    row.task = key.second;
    for (const auto& sp : sps) {
      row.pooled.S_FP16 += sp.S_FP16;
      row.pooled.S_INT4 += sp.S_INT4;
      row.pooled.std_FP16 += sp.std_FP16;
      row.pooled.std_INT4 += sp.std_INT4;
    }
    const double n = static_cast<double>(sps.size());
    row.pooled = {row.pooled.S_FP16 / n, row.pooled.S_INT4 / n, row.pooled.std_FP16 / n, row.pooled.std_INT4 / n};
    row.retention = PooledRetention(sps);
    if (row.pooled.std_FP16 > 0) row.std_delta = StdDelta(row.pooled);
    t.robustness.push_back(row);
  }
  return t;
}

std::string EmitReport(const std::vector<RunAggregate>& aggregates, ReportFormat format) {
  if (aggregates.empty()) throw Error("report needs at least one aggregate");
  const auto aggs = Sorted(aggregates);
  switch (format) {
    case ReportFormat::Markdown: return EmitMarkdown(BuildReportTables(aggs));
    case ReportFormat::Csv: return EmitCsv(aggs);
    case ReportFormat::Json: return EmitJson(aggs, BuildReportTables(aggs));
  }
  throw Error("unknown report format");
}

std::vector<RunAggregate> ParseReportCsv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw Error("empty csv report");
  const auto header = SplitCsvLine(line);
  constexpr std::size_t kFixed = 8;
  if (header.size() < kFixed || header[0] != "config_id" || (header.size() - kFixed) % kStatNames.size() != 0) {
    throw Error("not a csv report header");
  }
  std::vector<std::string> fields;
  for (std::size_t i = kFixed; i < header.size(); i += kStatNames.size()) {
    const auto& h = header[i];
    const auto suffix = "_" + kStatNames[0];
    if (h.size() <= suffix.size() || h.compare(h.size() - suffix.size(), suffix.size(), suffix) != 0) {
      throw Error("unexpected csv column '" + h + "'");
    }
    fields.push_back(h.substr(0, h.size() - suffix.size()));
  }
  std::vector<RunAggregate> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != header.size()) throw Error("csv row has " + std::to_string(cells.size()) + " cells");
    RunAggregate a;
    a.config = ParseConfigId(cells[0]);
    a.config.model_id = cells[6];
    if (std::string(ToString(a.config.precision_at_inference())) != cells[5]) {
      throw Error("csv precision does not match adaptation for " + cells[0]);
    }
    a.n_runs = static_cast<int>(ParseInt(cells[7]));
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::size_t base = kFixed + f * kStatNames.size();
      if (cells[base].empty()) continue;
      FieldStats s;
      s.mean = ParseDouble(cells[base]);
      s.median = ParseDouble(cells[base + 1]);
      s.std = ParseDouble(cells[base + 2]);
      s.q25 = ParseDouble(cells[base + 3]);
      s.q75 = ParseDouble(cells[base + 4]);
      a.fields.push_back({fields[f], s});
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::vector<std::string>> ParseMarkdownTable(std::string_view markdown, std::string_view title) {
  std::istringstream in{std::string(markdown)};
  std::string line;
  const std::string heading = "## " + std::string(title);
  bool found = false;
  while (std::getline(in, line)) {
    if (line == heading) {
      found = true;
      break;
    }
  }
  if (!found) throw Error("no table titled '" + std::string(title) + "'");
  std::vector<std::vector<std::string>> rows;
  int table_line = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      if (table_line > 0) break;
      continue;
    }
    if (line.front() != '|') break;
    if (table_line++ < 2) continue;  // header and alignment rows
    std::vector<std::string> cells;
    std::size_t pos = 1;
    while (pos < line.size()) {
      const auto bar = line.find('|', pos);
      if (bar == std::string::npos) break;
      cells.push_back(Trim(line.substr(pos, bar - pos)));
      pos = bar + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

// --- Plot data --------------------------------------------------------------

PlotFigure ParsePlotFigure(std::string_view s) {
  for (auto f : {PlotFigure::RoiQuadrant, PlotFigure::Density, PlotFigure::Pareto, PlotFigure::ColdStart,
                 PlotFigure::Fidelity, PlotFigure::Power}) {
    if (ToString(f) == s) return f;
  }
  throw Error("unknown figure '" + std::string(s) + "'");
}

std::string_view ToString(PlotFigure f) {
  switch (f) {
    case PlotFigure::RoiQuadrant: return "roi_quadrant";
    case PlotFigure::Density: return "density";
    case PlotFigure::Pareto: return "pareto";
    case PlotFigure::ColdStart: return "coldstart";
    case PlotFigure::Fidelity: return "fidelity";
    case PlotFigure::Power: return "power";
  }
  return "?";
}

std::vector<std::string> PlotColumns(PlotFigure f) {
  switch (f) {
    case PlotFigure::RoiQuadrant: return {"config_id", "N_break", "IPW", "quadrant"};
    case PlotFigure::Density: return {"config_id", "T_put", "M_vram", "rho_sys"};
    case PlotFigure::Pareto: return {"config_id", "T_put", "E_infer", "on_frontier"};
    case PlotFigure::ColdStart: return {"config_id", "E_load", "E_infer", "C_tax"};
    case PlotFigure::Fidelity:
      return {"config_id", "fp16_config_id", "task", "S_FP16", "S_INT4", "S_FP16_norm", "S_INT4_norm", "Q_ret",
              "std_delta"};
    case PlotFigure::Power: return {"t_s", "mean_w"};
  }
  return {};
}

namespace {

std::string SchemaLine(PlotFigure f) {
  std::string cols;
  for (const auto& c : PlotColumns(f)) cols += (cols.empty() ? "" : ",") + c;
  return "# schema: lcbench.plot." + std::string(ToString(f)) + " v1 columns=" + cols + "\n" + cols + "\n";
}

void RequireFields(const std::vector<RunAggregate>& aggs, PlotFigure f, const std::vector<std::string>& fields) {
  std::string missing;
  for (const auto& a : aggs) {
    for (const auto& name : fields) {
      if (!a.find(name)) missing += (missing.empty() ? "" : ", ") + name + " (" + a.config.id() + ")";
    }
  }
  if (!missing.empty()) {
    throw Error(std::string(ToString(f)) + " plot data missing fields: " + missing);
  }
}

}  // namespace

std::string EmitPlotData(const std::vector<RunAggregate>& input, PlotFigure figure,
                         std::optional<RoiThresholds> thresholds) {
  if (figure == PlotFigure::Power) throw Error("power plot data is built from a trace, not aggregates");
  const auto aggs = Sorted(input);
  std::string out = SchemaLine(figure);
  switch (figure) {
    case PlotFigure::RoiQuadrant: {
      RequireFields(aggs, figure, {"IPW"});
      std::vector<RoiPoint> points;
      for (const auto& a : aggs) {
        RoiPoint p{a.config.id(), std::nullopt, a.at("IPW").median};
        if (const auto* n = a.find("N_break")) p.N_break = static_cast<std::int64_t>(std::ceil(n->median));
        points.push_back(p);
      }
      const auto quads = RoiQuadrants(points, thresholds);
      for (std::size_t i = 0; i < points.size(); ++i) {
        out += CsvEscape(points[i].config_id) + "," +
               (points[i].N_break ? std::to_string(*points[i].N_break) : std::string("inf")) + "," +
               FormatShortest(points[i].IPW) + "," + std::string(ToString(quads[i])) + "\n";
      }
      break;
    }
    case PlotFigure::Density:
      RequireFields(aggs, figure, {"T_put", "M_vram", "rho_sys"});
      for (const auto& a : aggs) {
        out += CsvEscape(a.config.id()) + "," + FormatShortest(a.at("T_put").median) + "," +
               FormatShortest(a.at("M_vram").median) + "," + FormatShortest(a.at("rho_sys").median) + "\n";
      }
      break;
    case PlotFigure::Pareto: {
      RequireFields(aggs, figure, {"T_put", "E_infer"});
      std::vector<FrontierPoint> points;
      for (const auto& a : aggs) points.push_back({a.config.id(), a.at("T_put").median, a.at("E_infer").median});
      MarkFrontier(points, true, true);
      for (const auto& p : points) {
        out += CsvEscape(p.config_id) + "," + FormatShortest(p.x) + "," + FormatShortest(p.y) + "," +
               (p.dominated || p.duplicate ? "false" : "true") + "\n";
      }
      break;
    }
    case PlotFigure::ColdStart:
      RequireFields(aggs, figure, {"E_load", "E_infer", "C_tax"});
      for (const auto& a : aggs) {
        out += CsvEscape(a.config.id()) + "," + FormatShortest(a.at("E_load").median) + "," +
               FormatShortest(a.at("E_infer").median) + "," + FormatShortest(a.at("C_tax").median) + "\n";
      }
      break;
    case PlotFigure::Fidelity: {
      RequireFields(aggs, figure, {"S_task"});
      for (const auto& p : PairByPrecision(aggs)) {
        const auto sp = ScorePair(p);
        const double scale = TaskScaleMax(p.int4->config.task);
        std::string std_delta;
        if (sp.std_FP16 > 0) std_delta = FormatShortest(StdDelta(sp));
        out += CsvEscape(p.int4->config.id()) + "," + CsvEscape(p.fp16->config.id()) + "," +
               std::string(ToString(p.int4->config.task)) + "," + FormatShortest(sp.S_FP16) + "," +
               FormatShortest(sp.S_INT4) + "," + FormatShortest(sp.S_FP16 / scale) + "," +
               FormatShortest(sp.S_INT4 / scale) + "," +
               (sp.S_FP16 != 0 ? FormatShortest(QuantizationFidelity(sp)) : std::string()) + "," + std_delta +
               "\n";
      }
      break;
    }
    case PlotFigure::Power: break;
  }
  return out;
}

std::string EmitPowerPlotData(const TelemetryTrace& trace, Millis bucket_ms) {
  std::string out = SchemaLine(PlotFigure::Power);
  for (const auto& [t, w] : BucketMeans(trace, bucket_ms)) {
    out += FormatShortest(static_cast<double>(t) / 1000.0) + "," + FormatShortest(w) + "\n";
  }
  return out;
}

}  // namespace lcbench
