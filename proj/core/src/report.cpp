#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "gwshm/errors.hpp"
#include "gwshm/pipeline.hpp"

namespace gwshm {
namespace {

constexpr std::string_view kCasesHeader =
    "path_id,window,alpha,train_count,holdout,band_lo_hz,band_hi_hz,metric,file,label,reference,"
    "role,score,critical_alpha,lower,upper,verdict";

std::vector<std::string> labels_of(const MetricReport& r) {
  std::vector<std::string> out;
  for (const auto& t : r.damage) out.push_back(t.label);
  return out;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string format_pct(double pct) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", pct);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::vector<SummaryTable> summary_table(const std::vector<DetectionReport>& reports) {
  if (reports.empty()) throw ValidationError("summary table: no reports");
  std::vector<SummaryTable> tables;
  for (const auto& rep : reports) {
    auto it = std::find_if(tables.begin(), tables.end(), [&](const SummaryTable& t) {
      return t.path_id == rep.path_id && t.window == rep.window && t.alpha == rep.alpha;
    });
    if (it == tables.end()) {
      SummaryTable t;
      t.path_id = rep.path_id;
      t.window = rep.window;
      t.alpha = rep.alpha;
      if (!rep.results.empty()) t.labels = labels_of(rep.results.front());
      t.footnotes = {
          "M = " + std::to_string(rep.train_count) + " baseline records in the F_m/Z ensemble, " +
              std::to_string(rep.holdout) + " held out",
          "alpha = " + format_double(rep.alpha),
          "band = [" + format_double(rep.band.lo_hz) + ", " + format_double(rep.band.hi_hz) +
              "] Hz",
      };
      tables.push_back(std::move(t));
      it = std::prev(tables.end());
    }
    for (const auto& res : rep.results) {
      if (labels_of(res) != it->labels) {
        throw ValidationError("summary table: reports for path '" + rep.path_id +
                              "' disagree on the damage labels");
      }
      SummaryTable::Row row;
      row.metric = res.metric;
      row.false_alarm_pct = res.false_alarm_pct();
      row.healthy_cases = res.healthy_cases;
      for (const auto& t : res.damage) {
        row.missed_pct.push_back(t.missed_pct());
        row.damage_cases.push_back(t.cases);
      }
      it->rows.push_back(std::move(row));
    }
  }
  for (auto& t : tables) {
    std::string counts = "false alarms over";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      counts += (i ? ", " : " ") + std::string(to_string(t.rows[i].metric)) + ": " +
                std::to_string(t.rows[i].healthy_cases);
    }
    counts += " healthy test cases";
    t.footnotes.push_back(counts);
  }
  return tables;
}

std::string render_text(const std::vector<SummaryTable>& tables) {
  std::ostringstream os;
  for (std::size_t b = 0; b < tables.size(); ++b) {
    const auto& t = tables[b];
    if (b) os << "\n";
    os << "path " << t.path_id << ", window " << t.window << ", alpha " << format_double(t.alpha)
       << "\n";

    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head = {"Metric", "False Alarms (%)"};
    for (const auto& l : t.labels) head.push_back(l + " missed (%)");
    grid.push_back(head);
    for (const auto& r : t.rows) {
      std::vector<std::string> line = {std::string(to_string(r.metric)),
                                       format_pct(r.false_alarm_pct)};
      for (double m : r.missed_pct) line.push_back(format_pct(m));
      grid.push_back(line);
    }
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& line : grid) {
      for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    for (const auto& line : grid) {
      std::string text;
      for (std::size_t c = 0; c < line.size(); ++c) {
        text += c + 1 < line.size() ? pad_right(line[c], width[c] + 2) : line[c];
      }
      os << text << "\n";
    }
    for (std::size_t i = 0; i < t.footnotes.size(); ++i) {
      os << "  [" << i + 1 << "] " << t.footnotes[i] << "\n";
    }
  }
  return os.str();
}

std::string render_csv(const std::vector<SummaryTable>& tables) {
  std::ostringstream os;
  os << "path_id,window,alpha,metric,column,percent,cases\n";
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      const std::string prefix = t.path_id + "," + t.window + "," + format_double(t.alpha) + "," +
                                 std::string(to_string(r.metric)) + ",";
      os << prefix << "false_alarms," << format_pct(r.false_alarm_pct) << "," << r.healthy_cases
         << "\n";
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        os << prefix << "missed:" << t.labels[i] << "," << format_pct(r.missed_pct[i]) << ","
           << r.damage_cases[i] << "\n";
      }
    }
  }
  return os.str();
}

std::string format_cases_csv(const std::vector<DetectionReport>& reports) {
  std::ostringstream os;
  os << kCasesHeader << "\n";
  for (const auto& rep : reports) {
    const std::string ctx = rep.path_id + "," + rep.window + "," + format_double(rep.alpha) + "," +
                            std::to_string(rep.train_count) + "," + std::to_string(rep.holdout) +
                            "," + format_double(rep.band.lo_hz) + "," +
                            format_double(rep.band.hi_hz) + ",";
    for (const auto& res : rep.results) {
      for (const auto& c : res.cases) {
        os << ctx << to_string(res.metric) << "," << c.file << "," << c.label << ","
           << c.reference << "," << to_string(c.role) << "," << format_double(c.score) << ","
           << format_double(c.critical_alpha) << "," << format_double(c.lower) << ","
           << format_double(c.upper) << "," << to_string(c.verdict) << "\n";
      }
    }
  }
  return os.str();
}

std::vector<DetectionReport> parse_cases_csv(std::string_view text) {
  std::vector<DetectionReport> reports;
  // Damage labels in order of first appearance per (path, window).
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> path_labels;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = trim(text.substr(pos, end == std::string_view::npos ? end : end - pos));
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kCasesHeader) {
        throw ValidationError("cases file: expected header '" + std::string(kCasesHeader) + "'");
      }
      header = true;
      continue;
    }
    const auto col = split(line, ',');
    if (col.size() != 17) {
      throw ValidationError("cases file line " + std::to_string(line_no) + ": expected 17 columns");
    }
    const std::string where = "cases file line " + std::to_string(line_no);
    const double alpha = parse_double(col[2], where + " alpha");
    auto rep = std::find_if(reports.begin(), reports.end(), [&](const DetectionReport& r) {
      return r.path_id == col[0] && r.window == col[1] && r.alpha == alpha;
    });
    if (rep == reports.end()) {
      DetectionReport r;
      r.path_id = col[0];
      r.window = col[1];
      r.alpha = alpha;
      r.train_count = parse_size(col[3], where + " train_count");
      r.holdout = parse_size(col[4], where + " holdout");
      r.band = {parse_double(col[5], where + " band_lo_hz"),
                parse_double(col[6], where + " band_hi_hz")};
      reports.push_back(std::move(r));
      rep = std::prev(reports.end());
    }
    const Metric metric = parse_metric(col[7]);
    auto res = std::find_if(rep->results.begin(), rep->results.end(),
                            [&](const MetricReport& m) { return m.metric == metric; });
    if (res == rep->results.end()) {
      MetricReport m;
      m.metric = metric;
      m.alpha = alpha;
      rep->results.push_back(std::move(m));
      res = std::prev(rep->results.end());
    }

    CaseRecord c;
    c.file = col[8];
    c.label = col[9];
    c.reference = col[10];
    if (col[11] == "healthy") {
      c.role = CaseRole::Healthy;
    } else if (col[11] == "damage") {
      c.role = CaseRole::Damage;
    } else {
      throw ValidationError(where + ": role must be healthy or damage");
    }
    c.score = parse_double(col[12], where + " score");
    c.critical_alpha = parse_double(col[13], where + " critical_alpha");
    c.lower = parse_double(col[14], where + " lower");
    c.upper = parse_double(col[15], where + " upper");
    if (col[16] == "damaged") {
      c.verdict = Verdict::Damaged;
    } else if (col[16] == "healthy") {
      c.verdict = Verdict::Healthy;
    } else {
      throw ValidationError(where + ": verdict must be healthy or damaged");
    }

    const bool flagged = c.verdict == Verdict::Damaged;
    if (c.role == CaseRole::Healthy) {
      ++res->healthy_cases;
      if (flagged) ++res->false_alarms;
    } else {
      auto& known = path_labels[{rep->path_id, rep->window}];
      if (std::find(known.begin(), known.end(), c.label) == known.end()) known.push_back(c.label);
      auto t = std::find_if(res->damage.begin(), res->damage.end(),
                            [&](const LabelTally& x) { return x.label == c.label; });
      if (t == res->damage.end()) {
        res->damage.push_back({c.label, 0, 0});
        t = std::prev(res->damage.end());
      }
      ++t->cases;
      if (!flagged) ++t->missed;
    }
    res->cases.push_back(std::move(c));
  }
  if (!header) throw ValidationError("cases file: missing header");

  // Present every metric's tallies in the path's label order.
  for (auto& rep : reports) {
    const auto& order = path_labels[{rep.path_id, rep.window}];
    for (auto& res : rep.results) {
      std::vector<LabelTally> sorted;
      for (const auto& label : order) {
        auto t = std::find_if(res.damage.begin(), res.damage.end(),
                              [&](const LabelTally& x) { return x.label == label; });
        sorted.push_back(t == res.damage.end() ? LabelTally{label, 0, 0} : *t);
      }
      res.damage = std::move(sorted);
    }
  }
  return reports;
}

}  // namespace gwshm
