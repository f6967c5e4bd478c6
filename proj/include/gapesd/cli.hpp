#pragma once

// Command-line front end. parse_and_dispatch returns 0 on success, 2 on argument errors and
// 1 on runtime failures (stiff integration, domain errors, I/O).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gapesd/csv.hpp"
#include "gapesd/dynamics.hpp"
#include "gapesd/entanglement.hpp"
#include "gapesd/errors.hpp"
#include "gapesd/experiments.hpp"
#include "gapesd/master_equation.hpp"
#include "gapesd/spectral.hpp"

namespace gapesd::cli {

/// Flags shared by every subcommand that builds a Scenario.
struct ScenarioFlags {
  double w1 = 1.1;
  double w2 = 0.1;
  double gamma1_half = 10.0;
  double gamma2_half = 1.0;
  bool one_lorentzian = false;
  double delta = 0.0;
  double rabi = 1.0;
  double omega0 = 0.0;
  double alpha = 0.5;
  std::string beta = "auto";
  double t_max = kDefaultTMax;
  int points = kDefaultGridPoints;

  void add_spectral(CLI::App& app) {
    auto* ow1 = app.add_option("--w1", w1, "weight of the positive Lorentzian")->capture_default_str();
    auto* ow2 = app.add_option("--w2", w2, "weight of the negative Lorentzian")->capture_default_str();
    app.add_option("--gamma1-half", gamma1_half, "half-width Gamma1/2 in units of Omega0")->capture_default_str();
    auto* og2 = app.add_option("--gamma2-half", gamma2_half, "half-width Gamma2/2 in units of Omega0")
                    ->capture_default_str();
    app.add_flag("--one-lorentzian", one_lorentzian, "single Lorentzian (w1=1, w2=0, gamma2=0)")
        ->excludes(ow1)
        ->excludes(ow2)
        ->excludes(og2);
  }

  void add_dynamics(CLI::App& app) {
    app.add_option("--delta", delta, "detuning omega_c - omega0 in units of Omega0")->capture_default_str();
    app.add_option("--rabi", rabi, "qubit-pseudomode coupling Omega0 (sets the unit)")->capture_default_str();
    app.add_option("--omega0", omega0, "qubit frequency (rotating-frame offset)")->capture_default_str();
    app.add_option("--alpha", alpha, "amplitude of |00>")->capture_default_str();
    app.add_option("--beta", beta, "amplitude of |11>, or 'auto' for sqrt(1 - alpha^2)")->capture_default_str();
    app.add_option("--t-max", t_max, "end of the time grid in units of 1/Omega0")->capture_default_str();
    app.add_option("--points", points, "number of time grid points")->capture_default_str();
  }

  SpectralDensity spectral() const {
    if (one_lorentzian) return SpectralDensity::one_lorentzian(gamma1_half);
    return SpectralDensity::band_gap(w1, w2, gamma1_half, gamma2_half);
  }

  QubitPairInit init() const {
    if (beta == "auto") return QubitPairInit::from_alpha(alpha);
    std::size_t used = 0;
    double b = 0.0;
    try {
      b = std::stod(beta, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != beta.size()) throw InvalidInput("--beta must be a number or 'auto'");
    return QubitPairInit::make(alpha, b);
  }

  Scenario scenario(const std::string& name) const {
    Scenario s;
    s.name = name;
    s.sd = spectral();
    s.delta = delta;
    s.rabi = rabi;
    s.omega0 = omega0;
    s.init = init();
    s.t_max = t_max;
    s.grid_points = points;
    s.check();
    return s;
  }
};

struct SweepFlags {
  std::string axis;
  std::vector<double> values;
  std::optional<double> from, to, step;

  void add(CLI::App& app, bool required) {
    auto* a = app.add_option("--axis", axis, "sweep axis: gamma2_half or delta_abs")
                  ->check(CLI::IsMember({"gamma2_half", "delta_abs"}));
    if (required) a->required();
    auto* v = app.add_option("--values", values, "comma-separated axis values")->delimiter(',');
    auto* f = app.add_option("--from", from, "first axis value of a uniform sweep");
    auto* t = app.add_option("--to", to, "last axis value of a uniform sweep");
    auto* s = app.add_option("--step", step, "spacing of a uniform sweep");
    v->excludes(f)->excludes(t)->excludes(s);
  }

  bool active() const { return !axis.empty(); }

  SweepSpec spec(const Scenario& base) const {
    SweepSpec sw;
    sw.base = base;
    sw.axis = parse_axis(axis);
    if (!values.empty()) {
      sw.values = values;
    } else if (from && to && step) {
      if (!(*step > 0.0) || *to < *from) throw InvalidInput("--from/--to/--step must describe an ascending range");
      sw.values = arange(*from, *to, *step);
    } else {
      throw InvalidInput("sweep needs --values or all of --from, --to, --step");
    }
    sw.check();
    return sw;
  }
};

namespace detail {

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) out << text;
  else csv::write_atomic(out_path, text);
}

inline std::string simulate_csv(const Scenario& s, const std::string& method, double tol, bool oracle) {
  const auto sys = s.system();
  const auto grid = s.grid();
  const Trajectory tr = method == "rk" ? propagate_rk(sys, grid, tol) : propagate_eigen(sys, grid, tol);
  std::optional<DensityTrajectory> rho;
  if (oracle) rho = propagate_lindblad(projector(Basis::qubit), sys, grid, tol);

  csv::Writer w;
  std::vector<std::string> cols = {"t", "re_c1", "im_c1", "abs2_c1", "abs2_b1", "abs2_b2", "norm"};
  if (oracle) cols.emplace_back("rho_ee");
  w.header(cols);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& x = tr.states[i];
    if (oracle) {
      w.row(tr.times[i], x.c1.real(), x.c1.imag(), std::norm(x.c1), std::norm(x.b1), std::norm(x.b2),
            excitation_norm(x), rho->states[i](idx(Basis::qubit), idx(Basis::qubit)).real());
    } else {
      w.row(tr.times[i], x.c1.real(), x.c1.imag(), std::norm(x.c1), std::norm(x.b1), std::norm(x.b2),
            excitation_norm(x));
    }
  }
  return w.str();
}

inline std::string esd_csv(const std::vector<Scenario>& scenarios, int jobs) {
  struct Row {
    double g2h, delta;
    std::optional<double> onset, trapped;
  };
  const auto rows = parallel_map<Row>(scenarios.size(), jobs, [&](std::size_t i) {
    const auto& s = scenarios[i];
    const auto rep = analyze(s.system(), s.init, s.t_max, s.grid_points);
    return Row{0.5 * s.sd.gamma2, s.delta, rep.onset, rep.trapped_value};
  });
  csv::Writer w;
  w.header({"gamma2_half", "delta", "esd_onset", "trapped_value"});
  for (const auto& r : rows) w.row(r.g2h, r.delta, r.onset, r.trapped);
  return w.str();
}

inline std::string preset_csv(const Preset& p, bool with_manifest, int jobs) {
  csv::Writer w;
  if (with_manifest)
    for (const auto& [k, v] : manifest(p)) w.comment(k, v);
  switch (p.kind) {
    case PresetKind::scenario_set: {
      w.header({"scenario", "t", "concurrence"});
      const auto tables = parallel_map<ConcurrenceTable>(p.scenarios.size(), jobs,
                                                         [&](std::size_t i) { return run_concurrence(p.scenarios[i]); });
      for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t k = 0; k < tables[i].t.size(); ++k)
          w.row(p.scenarios[i].name, tables[i].t[k], tables[i].concurrence[k]);
      break;
    }
    case PresetKind::concurrence_sweep: {
      const auto& sw = *p.sweep;
      w.header({"scenario", to_string(sw.axis), "t", "concurrence"});
      for (const auto& r : run_surface(sw, jobs)) w.row(sw.at(r.axis_value).name, r.axis_value, r.t, r.concurrence);
      break;
    }
    case PresetKind::density_sweep: {
      w.header({to_string(p.sweep->axis), "density"});
      for (auto [v, d] : run_density_sweep(*p.sweep)) w.row(v, d);
      break;
    }
    case PresetKind::density_profile: {
      const auto& pr = *p.profile;
      w.header({"delta", "density_" + pr.label1, "density_" + pr.label2});
      for (const auto& r : run_density_profile(pr)) w.row(r.delta, r.density1, r.density2);
      break;
    }
  }
  return w.str();
}

}  // namespace detail

inline int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                              std::ostream& err = std::cerr) {
  CLI::App app{"Entanglement dynamics of two qubits in band-gap structured reservoirs", "gapesd"};
  app.require_subcommand(1);

  ScenarioFlags sf;
  SweepFlags swf;
  std::string out_path;
  std::string method = "eigen";
  double tol = kDefaultRkTol;
  bool oracle = false;
  int jobs = 1;
  double dmin = 0.0, dmax = 20.0, dstep = 0.05;
  std::string preset_name;
  bool with_manifest = false;

  auto add_out = [&](CLI::App* s) { s->add_option("-o,--out", out_path, "write CSV to this path instead of stdout"); };
  auto add_jobs = [&](CLI::App* s) {
    s->add_option("--jobs", jobs, "worker threads for sweeps (output order is unaffected)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  auto* sim = app.add_subcommand("simulate", "amplitude trajectory of one qubit");
  sf.add_spectral(*sim);
  sf.add_dynamics(*sim);
  sim->add_option("--method", method, "propagator: eigen (exact) or rk (adaptive Runge-Kutta)")
      ->check(CLI::IsMember({"eigen", "rk"}))
      ->capture_default_str();
  sim->add_option("--tol", tol, "Runge-Kutta tolerance")->capture_default_str();
  sim->add_flag("--oracle", oracle, "append rho_ee from the Lindblad propagator")->group("");
  add_out(sim);

  auto* spec = app.add_subcommand("spectrum", "spectral density D as a function of detuning");
  sf.add_spectral(*spec);
  spec->add_option("--delta-min", dmin, "first detuning")->capture_default_str();
  spec->add_option("--delta-max", dmax, "last detuning")->capture_default_str();
  spec->add_option("--delta-step", dstep, "detuning spacing")->capture_default_str();
  add_out(spec);

  auto* esd = app.add_subcommand("esd-time", "ESD onset and trapped concurrence, optionally over a sweep");
  sf.add_spectral(*esd);
  sf.add_dynamics(*esd);
  swf.add(*esd, false);
  add_jobs(esd);
  add_out(esd);

  auto* swp = app.add_subcommand("sweep", "concurrence surface over gamma2_half or |delta|");
  sf.add_spectral(*swp);
  sf.add_dynamics(*swp);
  swf.add(*swp, true);
  add_jobs(swp);
  add_out(swp);

  auto* pre = app.add_subcommand("preset", "regenerate a named dataset (fig1a ... fig6)");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_flag("--manifest", with_manifest, "prefix the CSV with '# key=value' parameter lines");
  add_jobs(pre);
  add_out(pre);

  auto* chk = app.add_subcommand("check", "evaluate the qualitative ordering claims on the presets");
  add_jobs(chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  // Argument validation: everything that can be rejected before computing.
  Scenario scenario;
  std::optional<SweepSpec> sweep;
  std::optional<Preset> pst;
  try {
    if (*sim || *esd || *swp) {
      scenario = sf.scenario(sim->parsed() ? "simulate" : esd->parsed() ? "esd-time" : "sweep");
      if (sim->parsed()) gapesd::detail::require_tol(tol);
      if (swf.active()) sweep = swf.spec(scenario);
    } else if (*spec) {
      require_valid(sf.spectral());
      if (!(dstep > 0.0) || dmax < dmin) throw InvalidInput("--delta-min/--delta-max/--delta-step must be ascending");
    } else if (*pre) {
      pst = preset(preset_name);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*sim) {
      detail::emit(detail::simulate_csv(scenario, method, tol, oracle), out_path, out);
    } else if (*spec) {
      const auto sd = sf.spectral();
      csv::Writer w;
      w.header({"delta", "density"});
      for (double d : arange(dmin, dmax, dstep)) w.row(d, density_at_detuning(sd, d));
      detail::emit(w.str(), out_path, out);
    } else if (*esd) {
      detail::emit(detail::esd_csv(sweep ? sweep->scenarios() : std::vector<Scenario>{scenario}, jobs), out_path, out);
    } else if (*swp) {
      csv::Writer w;
      w.header({to_string(sweep->axis), "t", "concurrence"});
      for (const auto& r : run_surface(*sweep, jobs)) w.row(r.axis_value, r.t, r.concurrence);
      detail::emit(w.str(), out_path, out);
    } else if (*pre) {
      detail::emit(detail::preset_csv(*pst, with_manifest, jobs), out_path, out);
    } else if (*chk) {
      const auto report = check_orderings(ordering_presets(), jobs);
      bool all = true;
      for (const auto& r : report) {
        all = all && r.passed;
        out << (r.passed ? "PASS " : "FAIL ") << r.preset << ": " << r.claim << " | " << r.detail << "\n";
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (*sim || *esd || *swp) err << "parameters: " << describe(scenario.system()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gapesd::cli
