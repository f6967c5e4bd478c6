#pragma once

// Preset scenarios for the band-gap ESD study and the drivers that turn them into tables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gapesd/csv.hpp"
#include "gapesd/dynamics.hpp"
#include "gapesd/entanglement.hpp"
#include "gapesd/errors.hpp"
#include "gapesd/golden_section.hpp"
#include "gapesd/spectral.hpp"

namespace gapesd {

struct Scenario {
  std::string name;
  SpectralDensity sd;
  double delta = 0.0;
  QubitPairInit init;
  double t_max = kDefaultTMax;
  int grid_points = kDefaultGridPoints;
  double rabi = 1.0;
  double omega0 = 0.0;

  void check() const {
    require_valid(sd);
    init.check();
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidInput(name + ": t_max must be positive");
    if (grid_points < 2) throw InvalidInput(name + ": grid_points must be at least 2");
    if (!std::isfinite(delta) || !std::isfinite(omega0)) throw InvalidInput(name + ": non-finite detuning");
    if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw InvalidInput(name + ": rabi must be non-negative");
  }

  SystemParams system() const {
    check();
    return SystemParams::from(sd, delta, rabi, omega0);
  }

  std::vector<double> grid() const { return uniform_grid(t_max, grid_points); }
};

enum class SweepAxis { gamma2_half, delta_abs };

inline const char* to_string(SweepAxis a) { return a == SweepAxis::gamma2_half ? "gamma2_half" : "delta_abs"; }

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "gamma2_half") return SweepAxis::gamma2_half;
  if (s == "delta_abs") return SweepAxis::delta_abs;
  throw InvalidInput("unknown sweep axis '" + s + "' (expected gamma2_half or delta_abs)");
}

struct SweepSpec {
  Scenario base;
  SweepAxis axis = SweepAxis::delta_abs;
  std::vector<double> values;

  Scenario at(double value) const {
    Scenario s = base;
    s.name = base.name + "_" + to_string(axis) + "_" + csv::format(value);
    if (axis == SweepAxis::gamma2_half) s.sd.gamma2 = 2.0 * value;
    else s.delta = value;
    return s;
  }

  /// Throws InvalidInput naming the offending value when an induced scenario is invalid.
  void check() const {
    if (values.empty()) throw InvalidInput(base.name + ": sweep has no values");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1])) throw InvalidInput(base.name + ": sweep values must be strictly increasing");
    for (double v : values) {
      if (axis == SweepAxis::delta_abs && v < 0.0) throw InvalidInput(base.name + ": |delta| must be non-negative");
      try {
        at(v).check();
      } catch (const InvalidInput& e) {
        throw InvalidInput(std::string(to_string(axis)) + "=" + csv::format(v) + ": " + e.what());
      }
    }
  }

  std::vector<Scenario> scenarios() const {
    std::vector<Scenario> out;
    for (double v : values) out.push_back(at(v));
    return out;
  }
};

/// Two spectral models evaluated over a common detuning grid.
struct DensityProfileSpec {
  std::string label1, label2;
  SpectralDensity model1, model2;
  std::vector<double> deltas;
};

enum class PresetKind { scenario_set, concurrence_sweep, density_sweep, density_profile };

/// The qualitative statement a preset is expected to reproduce.
enum class Expectation {
  none,
  onset_decreasing_in_axis,   ///< ESD sooner as the axis value grows
  onset_increasing_in_axis,   ///< ESD later as the axis value grows
  density_increasing_in_axis,
  density_decreasing_in_axis,
  coupling_regimes,           ///< trap / die / revive, in scenario order
  onset_nondecreasing_in_axis,
  onset_single_interior_minimum,
};

struct Preset {
  std::string name;
  PresetKind kind = PresetKind::scenario_set;
  Expectation expect = Expectation::none;
  std::vector<Scenario> scenarios;
  std::optional<SweepSpec> sweep;
  std::optional<DensityProfileSpec> profile;
  /// Bracket (lo, hi) for the interior minimum of onset_single_interior_minimum.
  std::pair<double, double> turning_bracket{3.0, 4.0};

  /// All concrete scenarios, expanding a sweep.
  std::vector<Scenario> all_scenarios() const {
    if (kind == PresetKind::concurrence_sweep && sweep) return sweep->scenarios();
    if (kind == PresetKind::scenario_set) return scenarios;
    return {};
  }
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1a", "fig1b", "fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6"};
  return names;
}

inline std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  // For steps like 0.25 or 0.05 divide integers by 1/step so grid values print cleanly.
  const double inv = std::round(1.0 / step);
  const double first = std::round(lo * inv);
  const bool exact = std::abs(inv * step - 1.0) < 1e-12 && std::abs(first - lo * inv) < 1e-9;
  for (int i = 0; i < n; ++i) v.push_back(exact ? (first + i) / inv : lo + i * step);
  return v;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

inline Preset preset(const std::string& name) {
  const QubitPairInit init = QubitPairInit::make(0.5, std::sqrt(3.0) / 2.0);
  auto gap = [&](std::string n, double g1h, double g2h, double delta) {
    Scenario s;
    s.name = std::move(n);
    s.sd = SpectralDensity::band_gap(1.1, 0.1, g1h, g2h);
    s.delta = delta;
    s.init = init;
    return s;
  };

  Preset p;
  p.name = name;
  if (name == "fig1a" || name == "fig1b") {
    const bool resonant = name == "fig1a";
    p.kind = PresetKind::concurrence_sweep;
    p.expect = resonant ? Expectation::onset_decreasing_in_axis : Expectation::onset_increasing_in_axis;
    p.sweep = SweepSpec{gap(name, 10.0, 1.0, resonant ? 0.0 : 10.0), SweepAxis::gamma2_half, {1.0, 2.0, 9.0}};
  } else if (name == "fig2a" || name == "fig2b") {
    const bool resonant = name == "fig2a";
    p.kind = PresetKind::density_sweep;
    p.expect = resonant ? Expectation::density_increasing_in_axis : Expectation::density_decreasing_in_axis;
    p.sweep = SweepSpec{gap(name, 10.0, 1.0, resonant ? 0.0 : 10.0), SweepAxis::gamma2_half, linspace(1.0, 9.0, 33)};
  } else if (name == "fig3") {
    p.kind = PresetKind::scenario_set;
    p.expect = Expectation::coupling_regimes;
    p.scenarios = {gap("fig3_i", 11.0, 1.0, 0.0), gap("fig3_ii", 1.1, 0.1, 0.0), gap("fig3_iii", 0.11, 0.01, 0.0)};
  } else if (name == "fig4") {
    Scenario base;
    base.name = name;
    base.sd = SpectralDensity::one_lorentzian(10.0);
    base.init = init;
    p.kind = PresetKind::concurrence_sweep;
    p.expect = Expectation::onset_nondecreasing_in_axis;
    p.sweep = SweepSpec{base, SweepAxis::delta_abs, arange(0.0, 10.0, 0.25)};
  } else if (name == "fig5") {
    p.kind = PresetKind::concurrence_sweep;
    p.expect = Expectation::onset_single_interior_minimum;
    p.sweep = SweepSpec{gap(name, 10.0, 1.0, 0.0), SweepAxis::delta_abs, arange(0.0, 10.0, 0.25)};
  } else if (name == "fig6") {
    p.kind = PresetKind::density_profile;
    p.profile = DensityProfileSpec{"one_lorentzian", "band_gap", SpectralDensity::one_lorentzian(10.0),
                                   SpectralDensity::band_gap(1.1, 0.1, 10.0, 1.0), arange(-10.0, 10.0, 0.05)};
  } else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw LookupError("unknown preset '" + name + "'; valid names: " + valid);
  }
  return p;
}

namespace detail {

inline void scenario_manifest(std::vector<std::pair<std::string, std::string>>& out, const Scenario& s,
                              const std::string& prefix) {
  auto put = [&](const std::string& k, const std::string& v) { out.emplace_back(prefix + k, v); };
  put("w1", csv::format(s.sd.w1));
  put("w2", csv::format(s.sd.w2));
  put("gamma1_half", csv::format(0.5 * s.sd.gamma1));
  put("gamma2_half", csv::format(0.5 * s.sd.gamma2));
  put("delta", csv::format(s.delta));
  put("rabi", csv::format(s.rabi));
  put("omega0", csv::format(s.omega0));
  put("alpha", csv::format(s.init.alpha));
  put("beta", csv::format(s.init.beta));
  put("t_max", csv::format(s.t_max));
  put("grid_points", std::to_string(s.grid_points));
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv::format(v[i]);
  return s;
}

}  // namespace detail

/// Full parameter set of a preset as ordered key/value pairs.
inline std::vector<std::pair<std::string, std::string>> manifest(const Preset& p) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("preset", p.name);
  switch (p.kind) {
    case PresetKind::scenario_set:
      for (const auto& s : p.scenarios) detail::scenario_manifest(out, s, s.name + ".");
      break;
    case PresetKind::concurrence_sweep:
    case PresetKind::density_sweep:
      detail::scenario_manifest(out, p.sweep->base, "");
      out.emplace_back("axis", to_string(p.sweep->axis));
      out.emplace_back("values", detail::join(p.sweep->values));
      break;
    case PresetKind::density_profile:
      for (auto [label, sd] : {std::pair{p.profile->label1, p.profile->model1},
                               std::pair{p.profile->label2, p.profile->model2}}) {
        out.emplace_back(label + ".w1", csv::format(sd.w1));
        out.emplace_back(label + ".w2", csv::format(sd.w2));
        out.emplace_back(label + ".gamma1_half", csv::format(0.5 * sd.gamma1));
        out.emplace_back(label + ".gamma2_half", csv::format(0.5 * sd.gamma2));
      }
      out.emplace_back("deltas", detail::join(p.profile->deltas));
      break;
  }
  return out;
}

/// Evaluates fn(0..n-1) on up to `jobs` threads; results keep index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, jobs > 0 ? jobs : 1));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct ConcurrenceTable {
  std::vector<double> t;
  std::vector<double> concurrence;
};

inline ConcurrenceTable run_concurrence(const Scenario& s) {
  const auto traj = propagate_eigen(s.system(), s.grid());
  return {traj.times, concurrence_series(traj, s.init)};
}

struct SurfaceRow {
  double axis_value;
  double t;
  double concurrence;
};

inline std::vector<SurfaceRow> run_surface(const SweepSpec& sw, int jobs = 1) {
  sw.check();
  const auto tables = parallel_map<ConcurrenceTable>(sw.values.size(), jobs,
                                                     [&](std::size_t i) { return run_concurrence(sw.at(sw.values[i])); });
  std::vector<SurfaceRow> rows;
  for (std::size_t i = 0; i < tables.size(); ++i)
    for (std::size_t k = 0; k < tables[i].t.size(); ++k)
      rows.push_back({sw.values[i], tables[i].t[k], tables[i].concurrence[k]});
  return rows;
}

/// ESD onset per sweep value (absent where the concurrence never vanishes before t_max).
inline std::vector<std::optional<double>> run_onsets(const SweepSpec& sw, int jobs = 1) {
  sw.check();
  return parallel_map<std::optional<double>>(sw.values.size(), jobs, [&](std::size_t i) {
    const Scenario s = sw.at(sw.values[i]);
    return find_esd_onset(s.system(), s.init, s.t_max, s.grid_points);
  });
}

struct DensityRow {
  double delta;
  double density1;
  double density2;
};

inline std::vector<DensityRow> run_density_profile(const DensityProfileSpec& spec) {
  require_valid(spec.model1);
  require_valid(spec.model2);
  std::vector<DensityRow> rows;
  for (double d : spec.deltas)
    rows.push_back({d, density_at_detuning(spec.model1, d), density_at_detuning(spec.model2, d)});
  return rows;
}

/// D(ω0) at the base detuning for every sweep value.
inline std::vector<std::pair<double, double>> run_density_sweep(const SweepSpec& sw) {
  sw.check();
  std::vector<std::pair<double, double>> rows;
  for (double v : sw.values) {
    const Scenario s = sw.at(v);
    rows.emplace_back(v, density_at_detuning(s.sd, s.delta));
  }
  return rows;
}

struct CheckResult {
  std::string preset;
  std::string claim;
  bool passed = false;
  std::string detail;
  std::optional<double> turning_point;  ///< refined minimiser, onset_single_interior_minimum only
};

namespace detail {

inline std::string fmt_opt(const std::optional<double>& x) { return x ? csv::format(*x) : std::string("none"); }

/// Checks that seq is strictly monotone (or non-decreasing) in the axis; on failure reports
/// the first offending adjacent pair.
inline void check_monotone(CheckResult& r, const std::vector<double>& axis,
                           const std::vector<std::optional<double>>& seq, int direction, bool strict,
                           const char* what) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!seq[i]) {
      r.passed = false;
      r.detail = std::string(what) + " absent at axis=" + csv::format(axis[i]);
      return;
    }
  }
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const double d = (*seq[i] - *seq[i - 1]) * direction;
    if (strict ? !(d > 0.0) : d < 0.0) {
      r.passed = false;
      r.detail = "violating pair: axis " + csv::format(axis[i - 1]) + " -> " + fmt_opt(seq[i - 1]) + ", axis " +
                 csv::format(axis[i]) + " -> " + fmt_opt(seq[i]);
      return;
    }
  }
  r.passed = true;
  std::string s;
  for (std::size_t i = 0; i < seq.size() && i < 6; ++i) s += (i ? " " : "") + csv::format(axis[i]) + ":" + fmt_opt(seq[i]);
  if (seq.size() > 6) s += " ...";
  r.detail = std::string(what) + " " + s;
}

inline CheckResult check_preset(const Preset& p, int jobs) {
  CheckResult r;
  r.preset = p.name;
  switch (p.expect) {
    case Expectation::none:
      r.claim = "no ordering claim";
      r.passed = true;
      return r;
    case Expectation::onset_decreasing_in_axis:
    case Expectation::onset_increasing_in_axis: {
      const bool dec = p.expect == Expectation::onset_decreasing_in_axis;
      r.claim = std::string("ESD onset strictly ") + (dec ? "decreasing" : "increasing") + " in " +
                to_string(p.sweep->axis);
      check_monotone(r, p.sweep->values, run_onsets(*p.sweep, jobs), dec ? -1 : 1, true, "onsets");
      return r;
    }
    case Expectation::density_increasing_in_axis:
    case Expectation::density_decreasing_in_axis: {
      const bool inc = p.expect == Expectation::density_increasing_in_axis;
      r.claim = std::string("D(omega0) strictly ") + (inc ? "increasing" : "decreasing") + " in " +
                to_string(p.sweep->axis);
      std::vector<std::optional<double>> d;
      for (auto [v, dv] : run_density_sweep(*p.sweep)) d.emplace_back(dv);
      check_monotone(r, p.sweep->values, d, inc ? 1 : -1, true, "densities");
      return r;
    }
    case Expectation::onset_nondecreasing_in_axis: {
      r.claim = std::string("ESD onset non-decreasing in ") + to_string(p.sweep->axis);
      check_monotone(r, p.sweep->values, run_onsets(*p.sweep, jobs), 1, false, "onsets");
      return r;
    }
    case Expectation::coupling_regimes: {
      r.claim = "coupling regimes: trapping, permanent death, death and revival";
      if (p.scenarios.size() != 3) {
        r.detail = "expected three scenarios";
        return r;
      }
      std::ostringstream os;
      bool ok = true;
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& s = p.scenarios[k];
        const auto sys = s.system();
        const auto rep = analyze(sys, s.init, s.t_max, s.grid_points);
        bool good = false;
        if (k == 0) good = !rep.onset && rep.trapped_value && *rep.trapped_value > 0.0 && sys.pm.gamma1_prime == 0.0;
        if (k == 1) good = rep.onset && rep.revivals.empty();
        if (k == 2) good = rep.onset && !rep.revivals.empty();
        ok = ok && good;
        os << (k ? "; " : "") << s.name << (good ? " ok" : " FAIL") << " (onset=" << fmt_opt(rep.onset)
           << ", revivals=" << rep.revivals.size() << ", trapped=" << fmt_opt(rep.trapped_value) << ")";
      }
      r.passed = ok;
      r.detail = os.str();
      return r;
    }
    case Expectation::onset_single_interior_minimum: {
      const auto [lo, hi] = p.turning_bracket;
      r.claim = "ESD onset has a single interior minimum in (" + csv::format(lo) + ", " + csv::format(hi) + ") of " +
                to_string(p.sweep->axis);
      const auto& ax = p.sweep->values;
      const auto on = run_onsets(*p.sweep, jobs);
      for (std::size_t i = 0; i < on.size(); ++i) {
        if (!on[i]) {
          r.detail = "onset absent at axis=" + csv::format(ax[i]);
          return r;
        }
      }
      if (on.size() < 3) {
        r.detail = "need at least three sweep values";
        return r;
      }
      const std::size_t k = static_cast<std::size_t>(
          std::min_element(on.begin(), on.end(), [](auto& a, auto& b) { return *a < *b; }) - on.begin());
      if (k == 0 || k + 1 == on.size()) {
        r.detail = "minimum at sweep boundary axis=" + csv::format(ax[k]);
        return r;
      }
      for (std::size_t i = 1; i < on.size(); ++i) {
        const bool should_fall = i <= k;
        const bool falls = *on[i] < *on[i - 1];
        const bool rises = *on[i] > *on[i - 1];
        if ((should_fall && !falls) || (!should_fall && !rises)) {
          r.detail = "not unimodal: axis " + csv::format(ax[i - 1]) + " -> " + csv::format(*on[i - 1]) + ", axis " +
                     csv::format(ax[i]) + " -> " + csv::format(*on[i]);
          return r;
        }
      }
      auto onset_at = [&](double v) {
        const Scenario s = p.sweep->at(v);
        auto o = find_esd_onset(s.system(), s.init, s.t_max, s.grid_points);
        return o ? *o : s.t_max;
      };
      const double refined = golden_section_minimize(onset_at, ax[k - 1], ax[k + 1], 1e-6).x;
      r.turning_point = refined;
      r.passed = ax[k] > lo && ax[k] < hi && refined > lo && refined < hi;
      r.detail = "grid minimum at axis=" + csv::format(ax[k]) + " (onset " + csv::format(*on[k]) +
                 "), refined turning point " + csv::format(refined);
      return r;
    }
  }
  return r;
}

}  // namespace detail

/// One result per preset that carries an ordering claim; failures are reported, not thrown.
inline std::vector<CheckResult> check_orderings(const std::vector<Preset>& presets, int jobs = 1) {
  std::vector<CheckResult> out;
  for (const auto& p : presets) {
    if (p.expect == Expectation::none) continue;
    try {
      out.push_back(detail::check_preset(p, jobs));
    } catch (const std::exception& e) {
      CheckResult r;
      r.preset = p.name;
      r.claim = "evaluation";
      r.detail = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline std::vector<Preset> ordering_presets() {
  std::vector<Preset> v;
  for (const char* n : {"fig1a", "fig1b", "fig2a", "fig2b", "fig3", "fig4", "fig5"}) v.push_back(preset(n));
  return v;
}

inline std::vector<CheckResult> check_orderings() { return check_orderings(ordering_presets()); }

}  // namespace gapesd
