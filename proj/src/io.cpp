#include "wed/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wed {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& u) {
  out << "t,node_index,value\n";
  for (int n = 0; n <= u.steps(); ++n) {
    const auto s = u.slice(n);
    const std::string t = format_number(u.time(n));
    for (std::size_t i = 0; i < s.size(); ++i) out << t << ',' << i << ',' << format_number(s[i]) << '\n';
  }
}

void write_ri_trajectory_csv(std::ostream& out, const Trajectory& u) {
  out << "t,node_index,value,jump_magnitude\n";
  for (int n = 0; n <= u.steps(); ++n) {
    const auto s = u.slice(n);
    const std::string t = format_number(u.time(n));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double jump = n == 0 ? 0.0 : std::abs(s[i] - u.slice(n - 1)[i]);
      out << t << ',' << i << ',' << format_number(s[i]) << ',' << format_number(jump) << '\n';
    }
  }
}

void write_lagrangian_csv(std::ostream& out, const Trajectory& u) {
  out << "t,component_index,value\n";
  for (int n = 0; n <= u.steps(); ++n) {
    const auto s = u.slice(n);
    const std::string t = format_number(u.time(n));
    for (std::size_t i = 0; i < s.size(); ++i) out << t << ',' << i << ',' << format_number(s[i]) << '\n';
  }
}

std::string counterexample_csv(const std::vector<double>& v) {
  std::string s = "index,value\n";
  for (std::size_t i = 0; i < v.size(); ++i) s += std::to_string(i) + ',' + format_number(v[i]) + '\n';
  return s;
}

namespace {

// JSON has no inf/nan; keep them visible as strings instead of null.
Json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

Json to_json(const MinimizeReport& r) {
  return Json{{"converged", r.converged},
              {"iterations", r.iterations},
              {"value", num(r.value)},
              {"grad_norm", num(r.grad_norm)},
              {"message", r.message}};
}

Json to_json(const FixedPointReport& r) {
  return Json{{"converged", r.converged},
              {"outer_iterations", r.outer_iterations},
              {"theta", num(r.theta)},
              {"residuals", nums(r.residuals)},
              {"last_inner", to_json(r.last_inner)},
              {"message", r.message}};
}

Json to_json(const ContinuationResult& r) {
  Json reps = Json::array();
  for (const auto& x : r.reports) reps.push_back(to_json(x));
  return Json{{"complete", r.complete}, {"schedule", nums(r.schedule)}, {"reports", reps}};
}

Json to_json(const Compatibility& c) {
  return Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}};
}

Json to_json(const ConditionResult& c) {
  Json j{{"name", c.name},
         {"passed", c.passed},
         {"skipped", c.skipped},
         {"worst_margin", num(c.worst_margin)},
         {"samples", c.samples}};
  if (!c.counterexample.empty()) j["counterexample_csv"] = counterexample_csv(c.counterexample);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const PropertyReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) conds.push_back(to_json(c));
  return Json{{"passed", r.passed()}, {"seed", r.seed}, {"conditions", conds}};
}

Json to_json(const InvariantSolveResult& r) {
  Json compat = Json::array();
  for (const auto& c : r.compatibility) compat.push_back(to_json(c));
  return Json{{"residual", num(r.residual)},
              {"residual_per_eps", nums(r.residual_per_eps)},
              {"flagged", r.flagged},
              {"projected", r.projected},
              {"compatibility", compat},
              {"continuation", to_json(r.continuation)},
              {"self_check", to_json(r.report)}};
}

Json to_json(const LatticeAudit& a) {
  return Json{{"eps", num(a.eps)},
              {"value_u", num(a.value_u)},
              {"value_v", num(a.value_v)},
              {"value_min", num(a.value_min)},
              {"value_max", num(a.value_max)},
              {"margin_min", num(a.margin_min)},
              {"margin_max", num(a.margin_max)},
              {"passed", a.passed},
              {"note", a.note}};
}

Json to_json(const OrderedPair& p) {
  Json audits = Json::array();
  for (const auto& a : p.audits) audits.push_back(to_json(a));
  Json ru = Json::array();
  Json rv = Json::array();
  for (const auto& r : p.reports_u) ru.push_back(to_json(r));
  for (const auto& r : p.reports_v) rv.push_back(to_json(r));
  return Json{{"complete", p.complete},
              {"audit_passed", p.audit_passed},
              {"min_ordering_margin", num(p.min_ordering_margin)},
              {"schedule", nums(p.schedule)},
              {"audits", audits},
              {"ordering_margins", nums(p.ordering_margins)},
              {"reports_u", ru},
              {"reports_v", rv}};
}

Json to_json(const RIReport& r) {
  return Json{{"converged", r.converged},
              {"value", num(r.value)},
              {"stationarity", num(r.stationarity)},
              {"active_set_rounds", r.active_set_rounds},
              {"newton_iterations", r.newton_iterations},
              {"message", r.message}};
}

Json to_json(const RIContinuation& r) {
  Json reps = Json::array();
  for (const auto& x : r.reports) reps.push_back(to_json(x));
  return Json{{"complete", r.complete}, {"schedule", nums(r.schedule)}, {"reports", reps}};
}

Json to_json(const RIOrderedPair& p) {
  Json ru = Json::array();
  Json rv = Json::array();
  for (const auto& r : p.reports_u) ru.push_back(to_json(r));
  for (const auto& r : p.reports_v) rv.push_back(to_json(r));
  Json lat = Json::array();
  for (const auto& [a, b] : p.lattice_margins) lat.push_back(Json{{"margin_min", num(a)}, {"margin_max", num(b)}});
  return Json{{"complete", p.complete},
              {"min_ordering_margin", num(p.min_ordering_margin)},
              {"schedule", nums(p.schedule)},
              {"ordering_margins", nums(p.ordering_margins)},
              {"lattice_margins", lat},
              {"reports_u", ru},
              {"reports_v", rv}};
}

Json to_json(const EnergeticResiduals& r) {
  return Json{{"stability", num(r.stability)},
              {"stability_left", num(r.stability_left)},
              {"balance", num(r.balance)},
              {"stability_per_knot", nums(r.stability_per_knot)},
              {"balance_per_knot", nums(r.balance_per_knot)}};
}

Json to_json(const WideReport& r) {
  return Json{{"converged", r.converged}, {"lambda", num(r.lambda)}, {"minimize", to_json(r.minimize)}};
}

Json to_json(const WideContinuation& r) {
  Json reps = Json::array();
  for (const auto& x : r.reports) reps.push_back(to_json(x));
  return Json{{"complete", r.complete}, {"schedule", nums(r.schedule)}, {"reports", reps}};
}

Json to_json(const GrowthReport& r) {
  Json j{{"passed", r.passed},
         {"samples", r.samples},
         {"worst_energy_margin", num(r.worst_energy_margin)},
         {"worst_reaction_margin", num(r.worst_reaction_margin)}};
  if (!r.counterexample.empty()) j["counterexample_csv"] = counterexample_csv(r.counterexample);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace wed
