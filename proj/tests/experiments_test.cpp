#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gapesd/experiments.hpp"

using namespace gapesd;

TEST(Grids, ArangeIsExactForDecimalSteps) {
  const auto v = arange(0.0, 10.0, 0.25);
  ASSERT_EQ(v.size(), 41u);
  EXPECT_EQ(v[13], 3.25);
  EXPECT_EQ(v.back(), 10.0);
  const auto w = arange(-10.0, 10.0, 0.05);
  ASSERT_EQ(w.size(), 401u);
  EXPECT_EQ(w[200], 0.0);
  EXPECT_EQ(csv::format(w[1]), "-9.95");
  EXPECT_EQ(w.back(), 10.0);
}

TEST(Grids, Linspace) {
  const auto v = linspace(1.0, 9.0, 33);
  ASSERT_EQ(v.size(), 33u);
  EXPECT_EQ(v.front(), 1.0);
  EXPECT_EQ(v[4], 2.0);
  EXPECT_EQ(v.back(), 9.0);
}

TEST(Sweep, AxisParsing) {
  EXPECT_EQ(parse_axis("gamma2_half"), SweepAxis::gamma2_half);
  EXPECT_EQ(parse_axis("delta_abs"), SweepAxis::delta_abs);
  EXPECT_THROW(parse_axis("delta"), InvalidInput);
}

TEST(Sweep, InducedScenarios) {
  const auto p = preset("fig1a");
  const auto s = p.sweep->at(2.0);
  EXPECT_EQ(s.name, "fig1a_gamma2_half_2");
  EXPECT_EQ(s.sd.gamma2, 4.0);
  EXPECT_EQ(s.sd.gamma1, 20.0);
  const auto d = preset("fig5").sweep->at(3.25);
  EXPECT_EQ(d.delta, 3.25);
  EXPECT_EQ(d.name, "fig5_delta_abs_3.25");
}

TEST(Sweep, CheckNamesOffendingValue) {
  auto sw = *preset("fig1a").sweep;
  sw.values = {1.0, 2.0, 10.5};  // Γ2 > Γ1
  try {
    sw.check();
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("gamma2_half=10.5"), std::string::npos) << e.what();
  }
  sw.values = {};
  EXPECT_THROW(sw.check(), InvalidInput);
  sw.values = {2.0, 1.0};
  EXPECT_THROW(sw.check(), InvalidInput);
  auto dw = *preset("fig5").sweep;
  dw.values = {-1.0, 0.0};
  EXPECT_THROW(dw.check(), InvalidInput);
}

TEST(Presets, AllNamesResolve) {
  for (const auto& n : preset_names()) {
    const auto p = preset(n);
    EXPECT_EQ(p.name, n);
    for (const auto& s : p.all_scenarios()) EXPECT_NO_THROW(s.check()) << s.name;
  }
  EXPECT_EQ(preset("fig3").all_scenarios().size(), 3u);
  EXPECT_EQ(preset("fig4").all_scenarios().size(), 41u);
  EXPECT_EQ(preset("fig1b").all_scenarios().size(), 3u);
}

TEST(Presets, UnknownNameListsValidOnes) {
  try {
    preset("fig9");
    FAIL() << "expected LookupError";
  } catch (const LookupError& e) {
    const std::string msg = e.what();
    for (const auto& n : preset_names()) EXPECT_NE(msg.find(n), std::string::npos);
  }
}

TEST(Presets, ManifestCoversParameters) {
  const auto m = manifest(preset("fig3"));
  ASSERT_FALSE(m.empty());
  EXPECT_EQ(m.front().first, "preset");
  EXPECT_EQ(m.front().second, "fig3");
  auto has = [&](const std::string& k) {
    return std::any_of(m.begin(), m.end(), [&](auto& kv) { return kv.first.find(k) != std::string::npos; });
  };
  for (const char* k : {"w1", "w2", "gamma1_half", "gamma2_half", "delta", "alpha", "beta", "t_max", "grid_points"})
    EXPECT_TRUE(has(k)) << k;
}

TEST(Runs, ConcurrenceIsDeterministic) {
  const auto s = preset("fig3").scenarios[2];
  const auto a = run_concurrence(s);
  const auto b = run_concurrence(s);
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.concurrence, b.concurrence);
  ASSERT_EQ(a.t.size(), 2001u);
  EXPECT_NEAR(a.concurrence[0], std::sqrt(3.0) / 2.0, 1e-14);
}

TEST(Runs, SurfaceMatchesStandaloneRunsForAnyJobCount) {
  const auto sw = *preset("fig1a").sweep;
  const auto serial = run_surface(sw, 1);
  const auto parallel = run_surface(sw, 3);
  ASSERT_EQ(serial.size(), 3u * 2001u);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    ASSERT_EQ(serial[i].axis_value, parallel[i].axis_value);
    ASSERT_EQ(serial[i].t, parallel[i].t);
    ASSERT_EQ(serial[i].concurrence, parallel[i].concurrence);
  }
  for (std::size_t k = 0; k < sw.values.size(); ++k) {
    const auto tab = run_concurrence(sw.at(sw.values[k]));
    for (std::size_t i = 0; i < tab.t.size(); ++i) {
      const auto& row = serial[k * tab.t.size() + i];
      ASSERT_EQ(row.axis_value, sw.values[k]);
      ASSERT_EQ(row.t, tab.t[i]);
      ASSERT_EQ(row.concurrence, tab.concurrence[i]);
    }
  }
}

TEST(Runs, OnsetsMatchFindEsdOnset) {
  const auto sw = *preset("fig1b").sweep;
  const auto on = run_onsets(sw, 2);
  for (std::size_t i = 0; i < on.size(); ++i) {
    const auto s = sw.at(sw.values[i]);
    EXPECT_EQ(on[i], find_esd_onset(s.system(), s.init, s.t_max, s.grid_points));
  }
}

TEST(Runs, ParallelMapPropagatesErrors) {
  EXPECT_THROW(parallel_map<int>(5, 3,
                                 [](std::size_t i) -> int {
                                   if (i == 3) throw DomainError("boom");
                                   return static_cast<int>(i);
                                 }),
               DomainError);
  const auto v = parallel_map<int>(7, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
}

TEST(Runs, DensityProfileProperties) {
  const auto rows = run_density_profile(*preset("fig6").profile);
  ASSERT_EQ(rows.size(), 401u);
  const auto& centre = rows[200];
  EXPECT_EQ(centre.delta, 0.0);
  EXPECT_NEAR(centre.density1, 0.2, 1e-15);
  EXPECT_NEAR(centre.density2, 0.02, 1e-15);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].density1, 0.0);
    EXPECT_GE(rows[i].density2, 0.0);
    EXPECT_EQ(rows[i].density1, rows[400 - i].density1);
    EXPECT_EQ(rows[i].density2, rows[400 - i].density2);
    if (i > 0 && rows[i].delta <= 0.0) EXPECT_GT(rows[i].density1, rows[i - 1].density1);
  }
  // the band-gap model peaks off centre, near the critical detuning
  const auto peak = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.density2 < b.density2; });
  EXPECT_NEAR(std::abs(peak->delta), 3.07, 0.05);
}

TEST(Runs, DensitySweepOrdering) {
  const auto a = run_density_sweep(*preset("fig2a").sweep);
  const auto b = run_density_sweep(*preset("fig2b").sweep);
  ASSERT_EQ(a.size(), 33u);
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_GT(a[i].second, a[i - 1].second);
    EXPECT_LT(b[i].second, b[i - 1].second);
  }
}

TEST(Check, EmptyPresetListGivesEmptyReport) {
  EXPECT_TRUE(check_orderings(std::vector<Preset>{}).empty());
  EXPECT_TRUE(check_orderings({preset("fig6")}).empty());
}

TEST(Check, Fig3Regimes) {
  const auto r = check_orderings({preset("fig3")});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].passed) << r[0].detail;
}

TEST(Check, PerturbedPresetReportsViolatingPair) {
  auto p = preset("fig1a");
  p.expect = Expectation::onset_increasing_in_axis;
  const auto r = check_orderings({p});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].passed);
  EXPECT_EQ(r[0].detail.rfind("violating pair: axis 1 -> ", 0), 0u) << r[0].detail;
  EXPECT_NE(r[0].detail.find(", axis 2 -> "), std::string::npos) << r[0].detail;
}

TEST(Check, BadPresetIsReportedNotThrown) {
  auto p = preset("fig1a");
  p.sweep->values = {1.0, 20.0};
  const auto r = check_orderings({p});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].passed);
  EXPECT_NE(r[0].detail.find("gamma2_half=20"), std::string::npos) << r[0].detail;
}

TEST(Check, Fig5TurningPointNearCriticalDetuning) {
  const auto r = check_orderings({preset("fig5")}, 2);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].passed) << r[0].detail;
  ASSERT_TRUE(r[0].turning_point);
  EXPECT_NEAR(*r[0].turning_point, 3.1617, 1e-3);
}
