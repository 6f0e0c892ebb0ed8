#include "wed/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace wed {

Json to_json(const CheckLine& c) {
  Json j{{"suite", c.suite},
         {"check", c.check},
         {"passed", c.passed},
         {"gating", c.gating},
         {"value", std::isfinite(c.value) ? Json(c.value) : Json(format_number(c.value))},
         {"tolerance", c.tolerance}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const SuiteReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return Json{{"suite", r.suite}, {"passed", r.passed}, {"checks", checks}};
}

std::filesystem::path output_root() {
  const char* env = std::getenv("WED_OUTPUT_ROOT");
  if (env && *env) return env;
  return "wed_output";
}

namespace {

std::string csv_of(void (*writer)(std::ostream&, const Trajectory&), const Trajectory& u) {
  std::ostringstream ss;
  writer(ss, u);
  return ss.str();
}

// Largest |R u(t) - u(t)| over nodes, with the slice where it happens.
struct Worst {
  double value = 0.0;
  int knot = 0;
};

Worst worst_slice(const RMap& r, const Trajectory& u) {
  Worst w;
  for (int n = 0; n <= u.steps(); ++n) {
    const Field f = u.field(n);
    const Field g = apply_rmap(r, f);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = std::abs(g[i] - f[i]);
      if (d > w.value) w = {d, n};
    }
  }
  return w;
}

std::string slice_csv(const Field& u, const Field& ru) {
  std::string s = "index,u,Ru\n";
  for (std::size_t i = 0; i < u.size(); ++i)
    s += std::to_string(i) + ',' + format_number(u[i]) + ',' + format_number(ru[i]) + '\n';
  return s;
}

class Runner {
 public:
  Runner(const Scenario& sc, std::filesystem::path dir) : sc_(sc), dir_(std::move(dir)) {}

  RunResult run() {
    std::filesystem::create_directories(dir_);
    write_json(dir_ / "effective_config.json", sc_.effective);
    if (sc_.wed) run_wed();
    if (sc_.ri) run_ri();
    if (sc_.wave) run_wave();
    if (sc_.lagrangian) run_lagrangian();
    return finish();
  }

 private:
  void add(std::string suite, std::string check, bool passed, double value, double tol, std::string note = {},
           bool gating = true) {
    res_.checks.push_back({std::move(suite), std::move(check), passed, gating, value, tol, std::move(note)});
  }

  void not_converged(const std::string& what) {
    if (res_.converged) res_.message = what;
    res_.converged = false;
  }

  // ---- WED families -----------------------------------------------------------

  void run_wed() {
    const WedProblem& p = *sc_.wed;
    const auto cont = eps_continuation(p, sc_.schedule, sc_.fixed_point);
    Json solve{{"continuation", to_json(cont)}};
    if (!cont.complete) not_converged("epsilon continuation stopped before the last epsilon");
    if (!cont.family.empty()) {
      write_text(dir_ / "trajectory.csv", csv_of(write_trajectory_csv, cont.final()));
      WedProblem q = p;
      q.epsilon = cont.schedule[cont.family.size() - 1];
      const auto el = euler_lagrange_residual(q, cont.final());
      solve["euler_lagrange_interior"] = el.interior_max;
      solve["euler_lagrange_terminal"] = el.terminal;
      solve["strong_residual"] = strong_solution_residual(cont.final(), q);
      try {
        const Trajectory ref = reference_solve(q, sc_.fixed_point.inner);
        const double dist = trajectory_distance(cont.final(), ref, 2.0);
        const double rel = dist / std::max(trajectory_norm(ref, 2.0), 1e-300);
        solve["distance_to_implicit_euler"] = dist;
        solve["relative_distance_to_implicit_euler"] = rel;
        add("solve", "relative L2 distance to implicit Euler", true, rel, 0.0, "diagnostic", false);
      } catch (const std::runtime_error& e) {
        solve["implicit_euler_error"] = e.what();
        not_converged(e.what());
      }
    }
    write_json(dir_ / "solve.json", solve);
    add("solve", "continuation complete", cont.complete, static_cast<double>(cont.family.size()),
        static_cast<double>(sc_.schedule.size()));

    for (std::size_t k = 0; k < sc_.maps.size(); ++k) run_map(k);
    if (sc_.comparison) run_comparison();
  }

  void run_map(std::size_t k) {
    const WedProblem& p = *sc_.wed;
    const RMap& r = sc_.maps[k];
    const std::string tag = "map" + std::to_string(k) + "_" + sanitize(r.name());
    const std::string suite = "invariance:" + r.name();
    InvariantSolveOptions opt;
    opt.fixed_point = sc_.fixed_point;
    opt.tolerance = sc_.invariance_tolerance;
    opt.allow_incompatible = true;
    Json rep;
    try {
      const auto res = invariant_solve(p, r, sc_.schedule, opt);
      rep = to_json(res);
      const bool compat = compatible(res.compatibility);
      std::string failed;
      for (const auto& c : res.compatibility)
        if (!c.passed) failed += (failed.empty() ? "" : "; ") + c.name;
      add(suite, "compatibility", compat, compat ? 1.0 : 0.0, 1.0, failed);
      if (!res.continuation.complete) not_converged("invariant solve for " + r.name() + " did not converge");
      if (!res.continuation.family.empty()) {
        const Trajectory& u = res.trajectory;
        write_text(dir_ / (tag + ".csv"), csv_of(write_trajectory_csv, u));
        const bool ok = res.residual <= sc_.invariance_tolerance;
        add(suite, "invariance residual", ok, res.residual, sc_.invariance_tolerance);
        if (!ok) {
          const Worst w = worst_slice(r, u);
          const Field f = u.field(w.knot);
          rep["counterexample"] = Json{{"t", u.time(w.knot)}, {"csv", slice_csv(f, apply_rmap(r, f))}};
          write_text(dir_ / (tag + "_counterexample.csv"), slice_csv(f, apply_rmap(r, f)));
        }
      }
    } catch (const PreconditionError& e) {
      add(suite, "hypotheses", false, 0.0, 0.0, e.what());
      rep = Json{{"error", e.what()}};
    }
    if (sc_.check_samples > 0) {
      const auto r1 = check_r1(r, p.grid, p.components, sc_.check_samples, sc_.seed + 101 * k);
      const auto r2 = check_r2(r, p, sc_.check_samples, sc_.seed + 101 * k + 1);
      rep["check_r1"] = to_json(r1);
      rep["check_r2"] = to_json(r2);
      add(suite, "R1 sampled", r1.passed(), worst_margin(r1), 0.0);
      add(suite, "R2 sampled", r2.passed(), worst_margin(r2), 0.0);
    }
    write_json(dir_ / (tag + ".json"), rep);
  }

  static double worst_margin(const PropertyReport& r) {
    double m = 0.0;
    bool any = false;
    for (const auto& c : r.conditions) {
      if (c.skipped) continue;
      m = any ? std::min(m, c.worst_margin) : c.worst_margin;
      any = true;
    }
    return m;
  }

  static std::string sanitize(std::string s) {
    for (char& c : s)
      if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
  }

  void run_comparison() {
    const WedProblem& p = *sc_.wed;
    const auto pair = ordered_minimizers(p, p.initial, *sc_.comparison, sc_.schedule, sc_.fixed_point);
    write_json(dir_ / "comparison.json", to_json(pair));
    if (!pair.u.steps() || pair.schedule.empty()) {
      not_converged("comparison pair did not solve");
      return;
    }
    write_text(dir_ / "comparison_u.csv", csv_of(write_trajectory_csv, pair.u));
    write_text(dir_ / "comparison_v.csv", csv_of(write_trajectory_csv, pair.v));
    if (!pair.complete) not_converged("comparison pair did not converge");
    add("comparison", "ordering margin", pair.min_ordering_margin >= -sc_.ordering_tolerance,
        pair.min_ordering_margin, -sc_.ordering_tolerance);
    double worst = 0.0;
    for (const auto& a : pair.audits) worst = std::min({worst, a.margin_min, a.margin_max});
    add("comparison", "lattice value audit", pair.audit_passed, worst, 0.0);
  }

  // ---- rate independent -------------------------------------------------------

  void run_ri() {
    const RIProblem& p = *sc_.ri;
    const auto cont = ri_eps_continuation(p, sc_.schedule);
    Json solve{{"continuation", to_json(cont)}};
    if (!cont.family.empty()) {
      const Trajectory& u = cont.family.back();
      RIProblem q = p;
      q.epsilon = cont.schedule[cont.family.size() - 1];
      write_text(dir_ / "trajectory.csv", csv_of(write_ri_trajectory_csv, u));
      const auto er = energetic_residuals(u, q);
      solve["energetic"] = to_json(er);
      add("energetic", "global stability", er.stability <= sc_.energetic_tolerance, er.stability,
          sc_.energetic_tolerance);
      add("energetic", "energy balance", er.balance <= sc_.energetic_tolerance, er.balance, sc_.energetic_tolerance);
      const auto [inc, irep] = incremental_solve(q);
      write_text(dir_ / "incremental.csv", csv_of(write_ri_trajectory_csv, inc));
      const double d = trajectory_sup_distance(u, inc);
      solve["sup_distance_to_incremental"] = d;
      solve["incremental"] = to_json(irep);
      add("energetic", "sup distance to incremental minimisation", true, d, 0.0, "diagnostic", false);
    }
    write_json(dir_ / "solve.json", solve);
    if (!cont.complete) not_converged("rate-independent continuation stopped early");
    add("solve", "continuation complete", cont.complete, static_cast<double>(cont.family.size()),
        static_cast<double>(sc_.schedule.size()));
    if (sc_.comparison) {
      const auto pair = ordered_ri_minimizers(p, p.initial, *sc_.comparison, sc_.schedule);
      write_json(dir_ / "comparison.json", to_json(pair));
      if (!pair.schedule.empty()) {
        write_text(dir_ / "comparison_u.csv", csv_of(write_ri_trajectory_csv, pair.u));
        write_text(dir_ / "comparison_v.csv", csv_of(write_ri_trajectory_csv, pair.v));
      }
      if (!pair.complete) not_converged("rate-independent comparison pair did not converge");
      add("comparison", "ordering margin", pair.min_ordering_margin >= -sc_.ordering_tolerance,
          pair.min_ordering_margin, -sc_.ordering_tolerance);
    }
  }

  // ---- WIDE -------------------------------------------------------------------

  template <class Problem>
  void wide_maps(const Problem& p, void (*writer)(std::ostream&, const Trajectory&)) {
    for (std::size_t k = 0; k < sc_.wide_maps.size(); ++k) {
      const WideMap& r = sc_.wide_maps[k];
      const std::string name = map_name(r);
      const std::string suite = "invariance:" + name;
      const std::string tag = "map" + std::to_string(k) + "_" + sanitize(name);
      Json rep;
      try {
        const auto res = wide_invariant_solve(p, r, sc_.schedule, sc_.fixed_point.inner);
        rep = Json{{"residual", res.residual}, {"flagged", res.flagged}, {"continuation", to_json(res.continuation)}};
        if (!res.continuation.complete) not_converged("WIDE invariant solve for " + name + " did not converge");
        write_text(dir_ / (tag + ".csv"), csv_of(writer, res.trajectory));
        add(suite, "invariance residual", res.residual <= sc_.invariance_tolerance, res.residual,
            sc_.invariance_tolerance);
      } catch (const PreconditionError& e) {
        rep = Json{{"error", e.what()}};
        if constexpr (std::is_same_v<Problem, LagrangianProblem>) {
          rep["note"] = "initial data not fixed by the map; only equivariance is checked";
        } else {
          add(suite, "hypotheses", false, 0.0, 0.0, e.what());
        }
      }
      if constexpr (std::is_same_v<Problem, LagrangianProblem>) {
        const double e = wide_equivariance_residual(p, r, sc_.schedule, sc_.fixed_point.inner);
        rep["equivariance_residual"] = e;
        add(suite, "equivariance residual", e <= sc_.invariance_tolerance, e, sc_.invariance_tolerance);
      }
      write_json(dir_ / (tag + ".json"), rep);
    }
  }

  static std::string map_name(const WideMap& r) {
    switch (r.kind) {
      case WideMapKind::rigid:
        return "rigid";
      case WideMapKind::averaging:
        return "averaging(" + std::to_string(r.axis) + ")";
      case WideMapKind::lagrangian_affine:
        return "affine";
    }
    return "?";
  }

  void run_wave() {
    const WideWaveProblem& p = *sc_.wave;
    const auto cont = wide_eps_continuation(p, sc_.schedule, sc_.fixed_point.inner);
    write_json(dir_ / "solve.json", Json{{"continuation", to_json(cont)}});
    if (!cont.family.empty()) write_text(dir_ / "trajectory.csv", csv_of(write_trajectory_csv, cont.family.back()));
    if (!cont.complete) not_converged("WIDE continuation stopped early");
    add("solve", "continuation complete", cont.complete, static_cast<double>(cont.family.size()),
        static_cast<double>(sc_.schedule.size()));
    wide_maps(p, write_trajectory_csv);
  }

  void run_lagrangian() {
    const LagrangianProblem& p = *sc_.lagrangian;
    const auto cont = wide_eps_continuation(p, sc_.schedule, sc_.fixed_point.inner);
    Json solve{{"continuation", to_json(cont)}};
    if (!cont.family.empty()) {
      const Trajectory& u = cont.family.back();
      write_text(dir_ / "trajectory.csv", csv_of(write_lagrangian_csv, u));
      const auto H = hamiltonian_series(p, u);
      double drift = 0.0;
      for (double h : H) drift = std::max(drift, std::abs(h - H.front()));
      drift /= std::max(std::abs(H.front()), 1e-300);
      Json hs = Json::array();
      for (double h : H) hs.push_back(h);
      solve["hamiltonian"] = hs;
      solve["hamiltonian_relative_drift"] = drift;
      add("wide", "Hamiltonian relative drift", drift <= 0.05, drift, 0.05, "diagnostic", false);
    }
    write_json(dir_ / "solve.json", solve);
    if (!cont.complete) not_converged("WIDE continuation stopped early");
    add("solve", "continuation complete", cont.complete, static_cast<double>(cont.family.size()),
        static_cast<double>(sc_.schedule.size()));
    wide_maps(p, write_lagrangian_csv);
  }

  // ---- summary ----------------------------------------------------------------

  RunResult finish() {
    bool pass = true;
    for (const auto& c : res_.checks)
      if (c.gating && !c.passed) pass = false;
    res_.exit_code = !res_.converged ? kExitNotConverged : pass ? kExitPass : kExitPropertyFailed;
    res_.directory = dir_;
    std::string csv = "suite,check,passed,gating,value,tolerance\n";
    Json checks = Json::array();
    for (const auto& c : res_.checks) {
      csv += c.suite + ',' + c.check + ',' + (c.passed ? "1" : "0") + ',' + (c.gating ? "1" : "0") + ',' +
             format_number(c.value) + ',' + format_number(c.tolerance) + '\n';
      checks.push_back(to_json(c));
    }
    write_text(dir_ / "summary.csv", csv);
    write_json(dir_ / "summary.json", Json{{"scenario", sc_.name},
                                           {"family", family_name(sc_.family)},
                                           {"exit_code", res_.exit_code},
                                           {"converged", res_.converged},
                                           {"message", res_.message},
                                           {"checks", checks}});
    return res_;
  }

  const Scenario& sc_;
  std::filesystem::path dir_;
  RunResult res_;
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& root) {
  return Runner(scenario, root / scenario.output_dir).run();
}

}  // namespace wed
