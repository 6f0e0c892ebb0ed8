#include "wed/newton.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace wed {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Reduced {
  std::vector<std::size_t> free;     // reduced -> full
  std::vector<std::ptrdiff_t> slot;  // full -> reduced (-1 when frozen)
};

Reduced reduce(const Objective& obj) {
  Reduced r;
  const auto fz = obj.frozen();
  r.slot.assign(obj.size(), -1);
  for (std::size_t i = 0; i < obj.size(); ++i) {
    if (fz[i]) continue;
    r.slot[i] = static_cast<std::ptrdiff_t>(r.free.size());
    r.free.push_back(i);
  }
  return r;
}

double scaled_norm(const Reduced& r, std::span<const double> g, const std::vector<double>& scale) {
  double m = 0.0;
  for (std::size_t i : r.free) m = std::max(m, std::abs(g[i]) / scale[i]);
  return m;
}

double dot_free(const Reduced& r, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i : r.free) s += a[i] * b[i];
  return s;
}

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  double value = 0.0;
};

// Strong-Wolfe line search (bracketing + bisection zoom). Rounding noise
// in the value is tolerated: when the value change is below the noise floor
// a decrease of the directional derivative magnitude is accepted instead.
class LineSearch {
 public:
  LineSearch(const Objective& obj, const Reduced& red, std::span<const double> x0, std::span<const double> d,
             double f0, double dphi0, const MinimizeOptions& opt)
      : obj_(obj), red_(red), x0_(x0), d_(d), f0_(f0), dphi0_(dphi0), opt_(opt),
        xt_(x0.begin(), x0.end()), gt_(x0.size()) {
    noise_ = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0));
  }

  LineSearchResult run() {
    double a_prev = 0.0;
    double f_prev = f0_;
    double a = 1.0;
    for (int k = 0; k < 20; ++k) {
      double dphi = 0.0;
      const double f = eval(a, dphi);
      if (!sufficient(a, f, dphi) || (k > 0 && f >= f_prev && !noisy(f))) return zoom(a_prev, a, f_prev);
      if (std::abs(dphi) <= -opt_.c2 * dphi0_) return {true, a, f};
      if (dphi >= 0.0) return zoom(a, a_prev, f);
      a_prev = a;
      f_prev = f;
      a *= 2.0;
    }
    return {true, a_prev, f_prev};
  }

 private:
  double eval(double a, double& dphi) {
    for (std::size_t i : red_.free) xt_[i] = x0_[i] + a * d_[i];
    std::fill(gt_.begin(), gt_.end(), 0.0);
    const double f = obj_.value_grad(xt_, gt_);
    dphi = dot_free(red_, gt_, d_);
    return f;
  }

  bool noisy(double f) const { return std::abs(f - f0_) <= noise_; }

  bool sufficient(double a, double f, double dphi) const {
    if (!std::isfinite(f)) return false;
    if (f <= f0_ + opt_.c1 * a * dphi0_) return true;
    return noisy(f) && std::abs(dphi) < std::abs(dphi0_);
  }

  LineSearchResult zoom(double lo, double hi, double f_lo) {
    for (int k = 0; k < 40; ++k) {
      const double a = 0.5 * (lo + hi);
      double dphi = 0.0;
      const double f = eval(a, dphi);
      if (!sufficient(a, f, dphi) || (f > f_lo && !noisy(f))) {
        hi = a;
      } else {
        if (std::abs(dphi) <= -opt_.c2 * dphi0_) return {true, a, f};
        if (dphi * (hi - lo) >= 0.0) hi = lo;
        lo = a;
        f_lo = f;
      }
      if (std::abs(hi - lo) < 1e-14) break;
    }
    if (lo > 0.0) return {true, lo, f_lo};
    return {false, 0.0, f0_};
  }

  const Objective& obj_;
  const Reduced& red_;
  std::span<const double> x0_;
  std::span<const double> d_;
  double f0_;
  double dphi0_;
  const MinimizeOptions& opt_;
  std::vector<double> xt_;
  std::vector<double> gt_;
  double noise_ = 0.0;
};

}  // namespace

double scaled_gradient_norm(const Objective& obj, std::span<const double> x) {
  const Reduced red = reduce(obj);
  std::vector<double> g(obj.size(), 0.0);
  obj.value_grad(x, g);
  return scaled_norm(red, g, obj.gradient_scale());
}

MinimizeReport minimize(const Objective& obj, std::vector<double>& x, const MinimizeOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  MinimizeReport rep;
  const Reduced red = reduce(obj);
  const auto scale = obj.gradient_scale();
  const std::size_t n = red.free.size();
  std::vector<double> g(obj.size(), 0.0);
  std::vector<double> d(obj.size(), 0.0);
  std::vector<Triplet> trip;
  double mu = 0.0;
  int stalls = 0;
  double best_gn = std::numeric_limits<double>::infinity();

  auto finish = [&](bool conv, const char* msg) {
    rep.converged = conv;
    rep.message = msg;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  };

  for (int it = 0;; ++it) {
    std::fill(g.begin(), g.end(), 0.0);
    const double f = obj.value_grad(x, g);
    rep.iterations = it;
    rep.value = f;
    rep.grad_norm = scaled_norm(red, g, scale);
    if (!std::isfinite(f)) return finish(false, "non-finite objective");
    if (rep.grad_norm <= opt.gtol * (1.0 + std::abs(f))) return finish(true, "gradient tolerance reached");
    if (n == 0) return finish(true, "no free coordinates");
    if (it >= opt.max_iter) return finish(false, "iteration limit");
    // steps whose value change drowns in rounding still count as progress
    // while they reduce the scaled gradient
    if (rep.grad_norm < 0.5 * best_gn) {
      best_gn = rep.grad_norm;
      stalls = 0;
    }

    trip.clear();
    obj.hessian(x, trip);
    std::vector<Eigen::Triplet<double>> et;
    et.reserve(trip.size());
    Vec diag = Vec::Zero(static_cast<Eigen::Index>(n));
    for (const auto& t : trip) {
      const auto r = red.slot[t.row];
      const auto c = red.slot[t.col];
      if (r < 0 || c < 0) continue;
      et.emplace_back(r, c, t.value);
      if (r == c) diag[r] += t.value;
    }
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) dmax = std::max(dmax, std::abs(diag[i]));
    if (!(dmax > 0.0)) dmax = 1.0;
    Vec sc(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < sc.size(); ++i) sc[i] = 1.0 / std::sqrt(std::max(std::abs(diag[i]), 1e-12 * dmax));
    for (auto& t : et) t = Eigen::Triplet<double>(t.row(), t.col(), t.value() * sc[t.row()] * sc[t.col()]);
    SpMat H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    H.setFromTriplets(et.begin(), et.end());
    SpMat I(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    I.setIdentity();
    Vec rhs(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) rhs[static_cast<Eigen::Index>(k)] = -g[red.free[k]] * sc[static_cast<Eigen::Index>(k)];

    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      Eigen::SimplicialLDLT<SpMat> ldlt;
      SpMat A = mu > 0.0 ? SpMat(H + mu * I) : H;
      ldlt.compute(A);
      bool pd = ldlt.info() == Eigen::Success;
      if (pd) {
        const Vec& D = ldlt.vectorD();
        for (Eigen::Index i = 0; i < D.size(); ++i)
          if (!(D[i] > 0.0)) pd = false;
      }
      if (!pd) {
        mu = std::max(4.0 * mu, 1e-8);
        continue;
      }
      const Vec y = ldlt.solve(rhs);
      std::fill(d.begin(), d.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) d[red.free[k]] = y[static_cast<Eigen::Index>(k)] * sc[static_cast<Eigen::Index>(k)];
      const double dphi0 = dot_free(red, g, d);
      if (!(dphi0 < 0.0)) {
        mu = std::max(4.0 * mu, 1e-8);
        continue;
      }
      LineSearch ls(obj, red, x, d, f, dphi0, opt);
      const auto res = ls.run();
      if (!res.ok) {
        mu = std::max(4.0 * mu, 1e-8);
        continue;
      }
      for (std::size_t i : red.free) x[i] += res.alpha * d[i];
      stepped = true;
      mu = res.alpha == 1.0 ? mu * 0.1 : mu;
      if (mu < 1e-12) mu = 0.0;
      stalls = std::abs(res.value - f) <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f)) ? stalls + 1 : 0;
    }
    if (!stepped) {
      rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return finish(false, "line search failed");
    }
    if (stalls > 25) return finish(false, "stagnation at rounding level");
  }
}

}  // namespace wed
