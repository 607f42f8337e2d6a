#include <gtest/gtest.h>

#include <cstdio>
#include <map>

#include "gwshm/errors.hpp"
#include "gwshm/pipeline.hpp"
#include "gwshm/simulate.hpp"

using namespace gwshm;

namespace {

MetricReport metric_report(Metric m, std::size_t healthy, std::size_t alarms,
                           std::vector<LabelTally> damage, double alpha = 0.05) {
  MetricReport r;
  r.metric = m;
  r.alpha = alpha;
  r.healthy_cases = healthy;
  r.false_alarms = alarms;
  r.damage = std::move(damage);
  return r;
}

DetectionReport report(double alpha, std::vector<MetricReport> results) {
  DetectionReport d;
  d.path_id = "2-6";
  d.window = "first-packet";
  d.train_count = 15;
  d.holdout = 5;
  d.band = {150e3, 350e3};
  d.alpha = alpha;
  d.results = std::move(results);
  return d;
}

// Independent recount: percentage of flagged records, printed the same way.
std::string recount_pct(std::size_t flagged, std::size_t total) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", total ? 100.0 * flagged / total : 0.0);
  std::string s(buf);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

TEST(FormatPct, TrimsTrailingZeros) {
  EXPECT_EQ(format_pct(0.0), "0");
  EXPECT_EQ(format_pct(100.0), "100");
  EXPECT_EQ(format_pct(5.0), "5");
  EXPECT_EQ(format_pct(10.526315), "10.53");
  EXPECT_EQ(format_pct(7.1), "7.1");
  EXPECT_EQ(format_pct(1.0 / 3.0), "0.33");
}

TEST(SummaryTable, SingleMetricNoMisses) {
  const auto tables =
      summary_table({report(0.05, {metric_report(Metric::Z, 5, 0, {{"d1", 1, 0}})})});
  ASSERT_EQ(tables.size(), 1u);
  ASSERT_EQ(tables[0].rows.size(), 1u);
  EXPECT_EQ(tables[0].labels, std::vector<std::string>{"d1"});
  EXPECT_EQ(format_pct(tables[0].rows[0].missed_pct[0]), "0");
  const std::string text = render_text(tables);
  EXPECT_NE(text.find("Metric  False Alarms (%)  d1 missed (%)"), std::string::npos) << text;
  EXPECT_NE(text.find("Z       0                 0\n"), std::string::npos) << text;
  EXPECT_NE(text.find("M = 15 baseline records"), std::string::npos);
  EXPECT_NE(text.find("band = [150000, 350000] Hz"), std::string::npos);
}

TEST(SummaryTable, TwoAlphasTwoBlocks) {
  const auto tables =
      summary_table({report(0.05, {metric_report(Metric::F, 380, 20, {{"d1", 20, 3}})}),
                     report(0.01, {metric_report(Metric::F, 380, 4, {{"d1", 20, 8}}, 0.01)})});
  ASSERT_EQ(tables.size(), 2u);
  const std::string text = render_text(tables);
  EXPECT_NE(text.find("[2] alpha = 0.05"), std::string::npos) << text;
  EXPECT_NE(text.find("[2] alpha = 0.01"), std::string::npos) << text;
  const std::string csv = render_csv(tables);
  EXPECT_NE(csv.find("2-6,first-packet,0.05,F,false_alarms,5.26,380\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("2-6,first-packet,0.01,F,missed:d1,40,20\n"), std::string::npos) << csv;
}

TEST(SummaryTable, EmptyDamageOnlyFalseAlarmColumn) {
  const auto tables = summary_table({report(0.05, {metric_report(Metric::Fm, 5, 1, {})})});
  const std::string text = render_text(tables);
  EXPECT_EQ(text.find("missed"), std::string::npos);
  EXPECT_NE(text.find("Fm      20"), std::string::npos) << text;
}

TEST(SummaryTable, Errors) {
  EXPECT_THROW(summary_table({}), ValidationError);
  EXPECT_THROW(summary_table({report(0.05, {metric_report(Metric::F, 5, 0, {{"d1", 1, 0}}),
                                            metric_report(Metric::Z, 5, 0, {{"d2", 1, 0}})})}),
               ValidationError);
}

TEST(SummaryTable, PercentagesRecountFromVerdicts) {
  Scenario sc;
  sc.noise_std = noise_std_for_snr(sc.burst, sc.propagation.path_gain, 20.0);
  sc.damage = attenuation_ladder(4, 0.7);
  sc.seed = 8;
  SyntheticDataset ds = generate_dataset(sc);
  const LoadedDataset data{ds.manifest, ds.signals};
  const auto rep = run_inspection(data, "2-6",
                                  {Metric::F, Metric::Fm, Metric::Z, Metric::JanapatiDI,
                                   Metric::QiuDI},
                                  Alpha(0.05), PipelineConfig{});
  const auto csv = render_csv(summary_table({rep}));
  for (const auto& res : rep.results) {
    std::size_t healthy = 0;
    std::size_t alarms = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_label;
    for (const auto& c : res.cases) {
      const bool flagged = c.verdict == Verdict::Damaged;
      if (c.role == CaseRole::Healthy) {
        ++healthy;
        alarms += flagged;
      } else {
        auto& [n, missed] = per_label[c.label];
        ++n;
        missed += !flagged;
      }
    }
    const std::string prefix = "2-6,first-packet,0.05," + std::string(to_string(res.metric)) + ",";
    EXPECT_NE(csv.find(prefix + "false_alarms," + recount_pct(alarms, healthy) + "," +
                       std::to_string(healthy) + "\n"),
              std::string::npos);
    for (const auto& [label, counts] : per_label) {
      EXPECT_NE(csv.find(prefix + "missed:" + label + "," +
                         recount_pct(counts.second, counts.first) + "," +
                         std::to_string(counts.first) + "\n"),
                std::string::npos)
          << label;
    }
  }
}

TEST(CasesCsv, RoundTripRebuildsSummaries) {
  Scenario sc;
  sc.noise_std = noise_std_for_snr(sc.burst, sc.propagation.path_gain, 25.0);
  sc.damage = attenuation_ladder(3, 0.6);
  SyntheticDataset ds = generate_dataset(sc);
  const LoadedDataset data{ds.manifest, ds.signals};
  const std::vector<Metric> metrics{Metric::F, Metric::Z, Metric::QiuDI};
  const std::vector<DetectionReport> reps = {
      run_inspection(data, "2-6", metrics, Alpha(0.05), PipelineConfig{}),
      run_inspection(data, "2-6", metrics, Alpha(0.01), PipelineConfig{})};
  const std::string text = format_cases_csv(reps);
  const auto parsed = parse_cases_csv(text);
  EXPECT_EQ(format_cases_csv(parsed), text);
  EXPECT_EQ(render_text(summary_table(parsed)), render_text(summary_table(reps)));
  EXPECT_EQ(render_csv(summary_table(parsed)), render_csv(summary_table(reps)));
}

TEST(CasesCsv, Errors) {
  EXPECT_THROW(parse_cases_csv(""), ValidationError);
  EXPECT_THROW(parse_cases_csv("wrong,header\n"), ValidationError);
  const std::string header =
      "path_id,window,alpha,train_count,holdout,band_lo_hz,band_hi_hz,metric,file,label,"
      "reference,role,score,critical_alpha,lower,upper,verdict\n";
  EXPECT_THROW(parse_cases_csv(header + "a,b,c\n"), ValidationError);
  EXPECT_THROW(parse_cases_csv(header + "p,w,0.05,15,5,0,1,Z,f,l,ensemble,bogus,1,1,0,1,healthy\n"),
               ValidationError);
  EXPECT_NO_THROW(
      parse_cases_csv(header + "p,w,0.05,15,5,0,1,Z,f,l,ensemble,damage,1,1,0,1,healthy\n"));
}
