#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "gwshm/errors.hpp"
#include "gwshm/pipeline.hpp"
#include "gwshm/simulate.hpp"
#include "oracles.hpp"

using namespace gwshm;
namespace fs = std::filesystem;

namespace {

LoadedDataset in_memory(const Scenario& sc) {
  SyntheticDataset ds = generate_dataset(sc);
  return {std::move(ds.manifest), std::move(ds.signals)};
}

Scenario ladder_scenario(double snr_db, std::size_t steps = 6, std::uint64_t seed = 1) {
  Scenario sc;
  sc.noise_std = noise_std_for_snr(sc.burst, sc.propagation.path_gain, snr_db);
  sc.damage = attenuation_ladder(steps, 0.5);
  sc.seed = seed;
  return sc;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(PacketWindow, ExplicitAndFull) {
  const auto data = in_memory(ladder_scenario(40.0, 1));
  const Signal& s = data.signals[0];
  const Signal a = extract_packet(s, PacketWindow{"w", 0, 500});
  EXPECT_EQ(a.samples.size(), 500u);
  EXPECT_EQ(a.sample_rate, s.sample_rate);
  EXPECT_EQ(a.label, s.label);
  const Signal full = extract_packet(s, "full", data.manifest);
  EXPECT_EQ(full.samples, s.samples);
  const Signal fp = extract_packet(s, "first-packet", data.manifest);
  EXPECT_EQ(fp.t0_offset, 1190u);
  EXPECT_EQ(fp.samples.front(), s.samples[1190]);
  EXPECT_THROW(extract_packet(s, PacketWindow{"w", 7600, 500}), ValidationError);
  EXPECT_THROW(extract_packet(s, "missing", data.manifest), ValidationError);
}

TEST(PacketWindow, AutoLocatesArrival) {
  const Scenario sc = ladder_scenario(40.0, 1);
  const Signal s = propagate(sc.burst, sc.propagation, DamageSpec{}, sc.noise_std, 9);
  PacketWindow w{"auto", 0, 500, true, 0.1};
  const Signal p = extract_packet(s, w);
  EXPECT_NEAR(static_cast<double>(p.t0_offset), 1200.0, 25.0);
  EXPECT_EQ(p.samples.size(), 500u);
}

TEST(PacketWindow, AutoFailsOnFlatSignal) {
  Signal flat;
  flat.sample_rate = 1.0;
  flat.samples.assign(1000, 0.0);
  EXPECT_THROW(extract_packet(flat, PacketWindow{"auto", 0, 100, true, 0.1}), ComputationError);
  EXPECT_THROW(locate_packet(flat, 0.0), ValidationError);
}

TEST(Band, DefaultFromActuation) {
  const auto data = in_memory(ladder_scenario(40.0, 1));
  const FrequencyBand b = default_band(data.manifest);
  EXPECT_DOUBLE_EQ(b.lo_hz, 150e3);
  EXPECT_DOUBLE_EQ(b.hi_hz, 350e3);
  DatasetManifest bare = data.manifest;
  bare.center_frequency.reset();
  EXPECT_TRUE(std::isinf(default_band(bare).hi_hz));
  PipelineConfig cfg;
  cfg.band = FrequencyBand{1.0, 2.0};
  EXPECT_EQ(resolve_band(data.manifest, cfg).hi_hz, 2.0);
}

TEST(Split, FifteenFive) {
  const auto s = split_baselines(iota(20), 5, std::nullopt);
  EXPECT_EQ(s.train, iota(15));
  EXPECT_EQ(s.test, (std::vector<std::size_t>{15, 16, 17, 18, 19}));
}

TEST(Split, NoHoldout) {
  const auto s = split_baselines(iota(20), 0, std::nullopt);
  EXPECT_EQ(s.train.size(), 20u);
  EXPECT_TRUE(s.test.empty());
}

TEST(Split, ShuffleIsSeeded) {
  const auto a = split_baselines(iota(20), 5, 7u);
  const auto b = split_baselines(iota(20), 5, 7u);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, iota(15));
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.test.begin(), a.test.end());
  EXPECT_EQ(all.size(), 20u);
}

TEST(Split, TooFewBaselines) {
  EXPECT_THROW(split_baselines(iota(6), 5, std::nullopt), ValidationError);
  EXPECT_NO_THROW(split_baselines(iota(7), 5, std::nullopt));
}

TEST(Baseline, HeldOutRecordsDoNotTouchEnsemble) {
  auto data = in_memory(ladder_scenario(40.0, 1));
  const PipelineConfig cfg;
  const BaselineRun before = run_baseline(data, "2-6", "1", cfg);
  EXPECT_EQ(before.ensemble.size(), 15u);
  EXPECT_EQ(before.held_out.size(), 5u);
  for (std::size_t i : before.split.test) {
    for (double& v : data.signals[i].samples) v *= 3.0;
  }
  const BaselineRun after = run_baseline(data, "2-6", "1", cfg);
  EXPECT_EQ(before.ensemble.mean_psd(), after.ensemble.mean_psd());
  EXPECT_EQ(before.ensemble.var_psd(), after.ensemble.var_psd());
  EXPECT_NE(before.held_out[0].values, after.held_out[0].values);
}

TEST(Scoring, CaseCounts) {
  const auto data = in_memory(ladder_scenario(40.0, 6));
  const PipelineConfig cfg;
  const auto f = score_path(data, "2-6", Metric::F, cfg);
  const auto z = score_path(data, "2-6", Metric::Z, cfg);
  const auto q = score_path(data, "2-6", Metric::QiuDI, cfg);
  auto count = [](const MetricCases& m, CaseRole r) {
    return std::count_if(m.cases.begin(), m.cases.end(),
                         [r](const ScoredCase& c) { return c.role == r; });
  };
  EXPECT_EQ(count(f, CaseRole::Healthy), 20 * 19);
  EXPECT_EQ(count(f, CaseRole::Damage), 20 * 6);
  EXPECT_EQ(count(z, CaseRole::Healthy), 5);
  EXPECT_EQ(count(z, CaseRole::Damage), 6);
  EXPECT_EQ(z.train_count, 15u);
  EXPECT_EQ(count(q, CaseRole::Healthy), 20 * 19);
  for (const auto& c : q.cases) {
    EXPECT_EQ(c.scatter.size(), c.role == CaseRole::Healthy ? 18u : 19u);
  }
}

TEST(Inspection, StrongDamageNeverMissedByZ) {
  Scenario sc;
  sc.noise_std = noise_std_for_snr(sc.burst, sc.propagation.path_gain, 40.0);
  DamageSpec d;
  d.attenuation = 0.5;
  d.label = "half";
  sc.damage = {d};
  sc.damage_repeats = 5;
  const auto data = in_memory(sc);
  const auto r = run_inspection(data, "2-6", {Metric::Z}, Alpha(0.05), PipelineConfig{});
  ASSERT_EQ(r.results.size(), 1u);
  ASSERT_EQ(r.results[0].damage.size(), 1u);
  EXPECT_EQ(r.results[0].damage[0].cases, 5u);
  EXPECT_EQ(r.results[0].damage[0].missed, 0u);
  EXPECT_EQ(r.train_count, 15u);
}

TEST(Inspection, EmptyDamageHasOnlyFalseAlarms) {
  Scenario sc;
  sc.noise_std = 1e-5;
  const auto data = in_memory(sc);
  const auto r = run_inspection(data, "2-6", {Metric::Fm, Metric::QiuDI}, Alpha(0.05),
                                PipelineConfig{});
  for (const auto& m : r.results) {
    EXPECT_TRUE(m.damage.empty());
    EXPECT_GT(m.healthy_cases, 0u);
  }
  EXPECT_THROW(run_inspection(data, "9-9", {Metric::Fm}, Alpha(0.05), PipelineConfig{}),
               ValidationError);
  EXPECT_THROW(run_inspection(data, "2-6", {}, Alpha(0.05), PipelineConfig{}), ValidationError);
}

// Damage drawn from the healthy generator: the signal path is negligible
// against unit white noise, so every record is i.i.d. noise.
TEST(Inspection, NullCalibrationSingleBin) {
  LoadedDataset data;
  for (int set = 0; set < 40; ++set) {
    Scenario sc;
    sc.propagation.path_gain = 1e-12;
    sc.propagation.length = 2000;
    sc.packet_length = 700;
    sc.noise_std = 1.0;
    sc.seed = 1000 + set;
    sc.set_id = std::to_string(set);
    DamageSpec same;
    same.label = "same";
    sc.damage = {same};
    sc.damage_repeats = 50;
    auto part = in_memory(sc);
    if (set == 0) {
      data.manifest = part.manifest;
      data.manifest.entries.clear();
    }
    for (auto& e : part.manifest.entries) {
      e.file = e.file + "#" + sc.set_id;
      data.manifest.entries.push_back(e);
    }
    for (auto& s : part.signals) data.signals.push_back(std::move(s));
  }
  PipelineConfig cfg;
  cfg.welch.segment_length = 100;
  cfg.welch.nfft = 100;
  cfg.welch.overlap_fraction = 0.0;
  cfg.welch.window = WindowKind::Rectangular;
  cfg.welch.detrend_mean = false;
  cfg.band = FrequencyBand{5.2e6, 5.3e6};  // the 5.28 MHz bin only
  const Alpha a(0.05);
  const auto r = run_inspection(data, "2-6", {Metric::Fm}, a, cfg);
  const MetricReport& m = r.results[0];
  EXPECT_EQ(m.healthy_cases, 200u);
  ASSERT_EQ(m.damage.size(), 1u);
  EXPECT_EQ(m.damage[0].cases, 2000u);
  EXPECT_NEAR(m.false_alarm_pct(), 5.0, 4.0);
  EXPECT_NEAR(m.damage[0].missed_pct(), 95.0, 4.0);
}

TEST(Roc, GridShape) {
  const auto g = default_alpha_grid();
  ASSERT_EQ(g.size(), 61u);
  EXPECT_EQ(g.front(), 1e-6);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[30], 1e-3, 1e-15);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(Roc, TrapezoidAnchorsAndArea) {
  EXPECT_DOUBLE_EQ(auc_trapezoid({}), 0.5);
  EXPECT_DOUBLE_EQ(auc_trapezoid({{0.1, 0.0, 1.0}}), 1.0);
  EXPECT_DOUBLE_EQ(auc_trapezoid({{0.1, 0.5, 0.5}}), 0.5);
  EXPECT_DOUBLE_EQ(auc_trapezoid({{0.1, 1.0, 0.0}}), 0.0);
}

TEST(Roc, SeparatingMetricHasUnitArea) {
  const auto data = in_memory(ladder_scenario(40.0, 6));
  const auto z = score_path(data, "2-6", Metric::Z, PipelineConfig{});
  const auto roc = roc_sweep(z, data.manifest, default_alpha_grid());
  EXPECT_DOUBLE_EQ(roc.auc, 1.0);
  EXPECT_EQ(roc.points.size(), 61u);
  EXPECT_EQ(roc.points.back().fpr, 1.0);
  EXPECT_EQ(roc.points.back().tpr, 1.0);
  const auto d6 = roc_sweep(z, data.manifest, default_alpha_grid(), {"d6"});
  EXPECT_DOUBLE_EQ(d6.auc, 1.0);
  EXPECT_THROW(roc_sweep(z, data.manifest, default_alpha_grid(), {"none"}), ValidationError);
  EXPECT_THROW(roc_sweep(z, data.manifest, {}), ValidationError);
}

// Synthetic scored cases with uniform random Z-like scores and arbitrary roles.
TEST(Roc, RandomScoresGiveChanceArea) {
  DatasetManifest m;
  m.sample_rate = 1.0;
  m.entries = {{"h.csv", "healthy", "p", "1"}, {"d.csv", "d1", "p", "1"}};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> grid;
  for (int i = 1; i <= 400; ++i) grid.push_back(i / 400.0);
  for (int rep = 0; rep < 10; ++rep) {
    MetricCases mc;
    mc.metric = Metric::Z;
    mc.path_id = "p";
    for (int i = 0; i < 2000; ++i) {
      ScoredCase c;
      c.role = i % 2 == 0 ? CaseRole::Healthy : CaseRole::Damage;
      c.entry = i % 2;
      c.series.kind = Metric::Z;
      c.series.values = {u(rng)};
      c.series.decision_bins = {0};
      mc.cases.push_back(c);
    }
    EXPECT_NEAR(roc_sweep(mc, m, grid).auc, 0.5, 0.05);
  }
}

TEST(Roc, PointsMonotoneInAlpha) {
  const auto data = in_memory(ladder_scenario(20.0, 6, 3));
  for (Metric metric : {Metric::F, Metric::Fm, Metric::Z, Metric::JanapatiDI, Metric::QiuDI}) {
    const auto roc = roc_sweep(score_path(data, "2-6", metric, PipelineConfig{}), data.manifest,
                               default_alpha_grid());
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      EXPECT_GE(roc.points[i].fpr, roc.points[i - 1].fpr) << to_string(metric);
      EXPECT_GE(roc.points[i].tpr, roc.points[i - 1].tpr) << to_string(metric);
    }
    EXPECT_GE(roc.auc, 0.0);
    EXPECT_LE(roc.auc, 1.0);
  }
}

// Sweeping alpha through every operating point reproduces the rank-based AUC.
TEST(Roc, DecisionAreaMatchesMannWhitney) {
  const auto data = in_memory(ladder_scenario(20.0, 6, 5));
  for (Metric metric : {Metric::F, Metric::Z, Metric::QiuDI}) {
    const auto mc = score_path(data, "2-6", metric, PipelineConfig{});
    std::vector<double> healthy;
    std::vector<double> damage;
    std::vector<double> crit;
    // Critical alphas below the floor are indistinguishable in a decision sweep,
    // so both sides of the comparison clamp them to it.
    constexpr double kFloor = 1e-300;
    for (const auto& c : mc.cases) {
      const double ca = std::max(c.critical_alpha(metric), kFloor);
      crit.push_back(ca);
      (c.role == CaseRole::Healthy ? healthy : damage).push_back(-ca);
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
    std::vector<double> grid;
    for (std::size_t i = 1; i < crit.size(); ++i) grid.push_back(0.5 * (crit[i - 1] + crit[i]));
    grid.push_back(1.0);
    const auto roc = roc_sweep(mc, data.manifest, grid);
    EXPECT_NEAR(roc.auc, oracle::mann_whitney_auc(healthy, damage), 1e-9) << to_string(metric);
  }
}

TEST(Reports, ReproducibleBytes) {
  const auto a = in_memory(ladder_scenario(30.0, 3, 11));
  const auto b = in_memory(ladder_scenario(30.0, 3, 11));
  const std::vector<Metric> all{Metric::F, Metric::Fm, Metric::Z, Metric::JanapatiDI,
                                Metric::QiuDI};
  const auto ra = run_inspection(a, "2-6", all, Alpha(0.05), PipelineConfig{});
  const auto rb = run_inspection(b, "2-6", all, Alpha(0.05), PipelineConfig{});
  EXPECT_EQ(format_cases_csv({ra}), format_cases_csv({rb}));
}

TEST(Reports, DataOnDiskMatchesMemory) {
  const fs::path dir = fs::temp_directory_path() / "gwshm_test_pipeline_disk";
  fs::remove_all(dir);
  const Scenario sc = ladder_scenario(30.0, 2, 4);
  const auto mem = in_memory(sc);
  const auto disk = load_dataset(synth_dataset(sc, dir));
  const std::vector<Metric> all{Metric::F, Metric::Z, Metric::QiuDI};
  EXPECT_EQ(format_cases_csv({run_inspection(mem, "2-6", all, Alpha(0.05), PipelineConfig{})}),
            format_cases_csv({run_inspection(disk, "2-6", all, Alpha(0.05), PipelineConfig{})}));
  fs::remove_all(dir);
}
