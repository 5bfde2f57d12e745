#include "kdvbvp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "kdvbvp/error.hpp"

namespace kdvbvp {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_order(const Jet& jet, int order, const char* what) {
  if (jet.order() < order) {
    throw Error(ErrorCode::jet_too_short, std::string(what) + " jet has order " + std::to_string(jet.order()) +
                                              ", need " + std::to_string(order));
  }
}

}  // namespace

ResidualResult pde_residual(const SolutionField& field, const std::vector<double>& C) {
  const auto& t = field.t_grid;
  if (t.size() < 5 || field.slices.size() != t.size()) {
    throw Error(ErrorCode::grid_too_coarse, "the t grid needs at least 5 points for the residual stencil");
  }
  const double h = t[1] - t[0];
  for (size_t i = 1; i < t.size(); ++i) {
    if (!(h > 0.0) || std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h) {
      throw Error(ErrorCode::grid_too_coarse, "the t grid must be uniform and increasing");
    }
  }
  const int s = static_cast<int>(C.size()) - 1;
  std::vector<DiffPoly> flows;
  for (int v = 0; v <= s; ++v) flows.push_back(kdv_flow(v));

  ResidualResult out;
  double origin_abs = 0.0;
  double origin_qdot = 0.0;
  for (size_t i = 2; i + 2 < t.size(); ++i) {
    const auto& sl = field.slices[i];
    for (size_t j = 0; j < field.x_grid.size(); ++j) {
      const Jet& jet = sl.jets[j];
      require_order(jet, 2 * s + 1, "field");
      auto q = [&](size_t k) { return field.slices[k].jets[j][0]; };
      const double qdot = (8.0 * (q(i + 1) - q(i - 1)) - (q(i + 2) - q(i - 2))) / (12.0 * h);
      double rhs = 0.0;
      for (int v = 0; v <= s; ++v) rhs += C[static_cast<size_t>(v)] * eval_jet(flows[static_cast<size_t>(v)], jet);
      const double r = std::abs(qdot - rhs);
      if (field.x_grid[j] == 0.0) {
        origin_abs = std::max(origin_abs, r);
        origin_qdot = std::max(origin_qdot, std::abs(qdot));
        continue;
      }
      out.qdot_sup = std::max(out.qdot_sup, std::abs(qdot));
      if (r > out.absolute) {
        out.absolute = r;
        out.worst_t = t[i];
        out.worst_x = field.x_grid[j];
      }
    }
  }
  out.normalized = out.qdot_sup > 0.0 ? out.absolute / out.qdot_sup : out.absolute;
  const double origin_scale = std::max(out.qdot_sup, origin_qdot);
  out.at_origin = origin_scale > 0.0 ? origin_abs / origin_scale : origin_abs;
  return out;
}

CheckResult boundary_residual(const SolutionField& field, const std::vector<double>& a) {
  const int s = field.s();
  if (static_cast<int>(a.size()) < s + 1) {
    throw Error(ErrorCode::config_invalid, "need boundary constants a_1..a_{s+1}");
  }
  CheckResult out;
  auto update = [&](double err, double t, std::string where) {
    if (err > out.value || out.where.empty()) {
      out.value = std::max(out.value, err);
      out.worst_t = t;
      out.where = std::move(where);
    }
  };
  for (const auto& sl : field.slices) {
    require_order(sl.origin, 2 * s + 1, "origin");
    for (int n = 1; n <= s - 1; ++n) update(std::abs(b_n_eval(2 * n, sl.origin)), sl.t, "b" + std::to_string(2 * n));
    for (int n = 1; n <= s + 1; ++n) {
      update(std::abs(b_n_eval(2 * n - 1, sl.origin) - a[static_cast<size_t>(n) - 1]), sl.t,
             "b" + std::to_string(2 * n - 1) + " - a" + std::to_string(n));
    }
  }
  return out;
}

CheckResult laurent_crosscheck(const SolutionField& field, int n_max) {
  CheckResult out;
  for (const auto& sl : field.slices) {
    require_order(sl.origin, n_max - 1, "origin");
    for (int n = 1; n <= n_max; ++n) {
      const double from_jet = b_n_eval(n, sl.origin);
      const double err = std::abs(sl.measure.laurent(n) - from_jet) / std::max(1.0, std::abs(from_jet));
      if (err > out.value || out.where.empty()) {
        out.value = std::max(out.value, err);
        out.worst_t = sl.t;
        out.where = "b" + std::to_string(n);
      }
    }
  }
  return out;
}

CheckResult remark42_check(const SolutionField& field) {
  const int s = field.s();
  const double factor = (s % 2 == 1 ? 1.0 : -1.0) * std::ldexp(1.0, 2 * s);
  CheckResult out;
  out.where = "w";
  for (const auto& sl : field.slices) {
    require_order(sl.origin, 2 * s - 1, "origin");
    const double err = std::abs(sl.w.w - factor * b_n_eval(2 * s, sl.origin)) / (1.0 + std::abs(sl.w.w));
    if (err > out.value) {
      out.value = err;
      out.worst_t = sl.t;
    }
  }
  return out;
}

bool VerificationReport::passed() const {
  return std::all_of(details.begin(), details.end(), [](const CheckDetail& d) { return d.passed; });
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["residual_sup"] = residual_sup;
  j["boundary_max_err"] = boundary_max_err;
  j["laurent_max_err"] = laurent_max_err;
  j["remark42_max_err"] = remark42_max_err;
  j["bracket_ok"] = bracket_ok;
  j["pole_count_ok"] = pole_count_ok;
  j["passed"] = passed();
  nlohmann::json d = nlohmann::json::array();
  for (const auto& c : details) {
    d.push_back({{"check", c.check}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed},
                 {"note", c.note}});
  }
  j["details"] = d;
  return j;
}

VerificationReport verify(const SolutionField& field, const Tolerances& tol) {
  VerificationReport rep;
  auto add = [&](std::string check, double value, double tolerance, std::string note) {
    rep.details.push_back({std::move(check), value, tolerance, value <= tolerance, std::move(note)});
  };

  bool residual_possible = field.t_grid.size() >= 5;
  if (residual_possible) {
    try {
      const auto r = pde_residual(field, field.C);
      rep.residual_sup = r.normalized;
      add("pde_residual", r.normalized, tol.residual,
          "worst at t=" + fmt(r.worst_t) + " x=" + fmt(r.worst_x) + "; absolute " + fmt(r.absolute) +
              "; x=0 (not asserted) " + fmt(r.at_origin));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::grid_too_coarse) throw;
      residual_possible = false;
    }
  }
  if (!residual_possible) {
    rep.details.push_back({"pde_residual", 0.0, tol.residual, true, "skipped: t grid cannot carry the stencil"});
  }

  const auto b = boundary_residual(field, field.a);
  rep.boundary_max_err = b.value;
  add("boundary", b.value, tol.boundary, "worst " + b.where + " at t=" + fmt(b.worst_t));

  const auto l = laurent_crosscheck(field, 6);
  rep.laurent_max_err = l.value;
  add("laurent", l.value, tol.laurent, "worst " + l.where + " at t=" + fmt(l.worst_t));

  const auto r42 = remark42_check(field);
  rep.remark42_max_err = r42.value;
  add("remark42", r42.value, tol.remark42, "worst at t=" + fmt(r42.worst_t));

  rep.bracket_ok = true;
  std::string bracket_note = "all t";
  for (const auto& sl : field.slices) {
    if (!(sl.w.w > sl.w.lower && sl.w.w < sl.w.upper)) {
      rep.bracket_ok = false;
      bracket_note = "violated at t=" + fmt(sl.t);
      break;
    }
  }
  rep.details.push_back({"bracket", rep.bracket_ok ? 0.0 : 1.0, 0.0, rep.bracket_ok, bracket_note});

  rep.pole_count_ok = true;
  std::string pole_note = "expected " + std::to_string(field.expected_pole_count);
  for (const auto& sl : field.slices) {
    if (sl.measure.size() != field.expected_pole_count) {
      rep.pole_count_ok = false;
      pole_note += ", found " + std::to_string(sl.measure.size()) + " at t=" + fmt(sl.t);
      break;
    }
  }
  rep.details.push_back({"pole_count", rep.pole_count_ok ? 0.0 : 1.0, 0.0, rep.pole_count_ok, pole_note});
  return rep;
}

}  // namespace kdvbvp
