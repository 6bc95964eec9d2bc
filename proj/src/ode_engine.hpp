#pragma once

// Internal stepping engine shared by the flow routines. Not installed.

#include <array>
#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "implorenz/errors.hpp"
#include "implorenz/flow_core.hpp"

namespace implorenz::detail {

namespace odeint = boost::numeric::odeint;

template <std::size_t N>
using StateN = std::array<Real, N>;

/// Lorenz field, optionally time-reversed, optionally with the variational
/// equations for a row-major 3x3 matrix appended.
template <std::size_t N>
struct LorenzSystem {
  LorenzParams p;
  Real direction = 1;

  void operator()(const StateN<N>& x, StateN<N>& dx, Real /*t*/) const {
    dx[0] = direction * p.sigma * (x[1] - x[0]);
    dx[1] = direction * (p.r * x[0] - x[1] - x[0] * x[2]);
    dx[2] = direction * (x[0] * x[1] - p.b * x[2]);
    if constexpr (N == 12) {
      const Real a[3][3] = {{-p.sigma, p.sigma, 0},
                            {p.r - x[2], -1, -x[0]},
                            {x[1], x[0], -p.b}};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Real s = 0;
          for (int k = 0; k < 3; ++k) s += a[i][k] * x[3 + 3 * k + j];
          dx[3 + 3 * i + j] = direction * s;
        }
      }
    }
  }
};

/// One accepted step: state and derivative at both ends.
template <std::size_t N>
struct StepRecord {
  Real t0, t1;
  StateN<N> x0, x1, f0, f1;

  /// Cubic Hermite interpolation of component i.
  Real hermite(std::size_t i, Real t) const {
    const Real h = t1 - t0;
    const Real s = (t - t0) / h;
    const Real s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * x0[i] + (s3 - 2 * s2 + s) * h * f0[i] +
           (-2 * s3 + 3 * s2) * x1[i] + (s3 - s2) * h * f1[i];
  }
  StateN<N> hermite(Real t) const {
    StateN<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = hermite(i, t);
    return out;
  }
};

template <std::size_t N>
class Engine {
 public:
  using State = StateN<N>;
  using Stepper = odeint::runge_kutta_dopri5<State, Real, State, Real>;

  Engine(const LorenzParams& p, const IntegratorConfig& cfg, Real direction, const State& x0)
      : sys_{p, direction},
        cfg_(cfg),
        controlled_(odeint::make_controlled<Stepper>(cfg.abs_tol, cfg.rel_tol)),
        x_(x0) {
    sys_(x_, f_, 0);
    check_escape(x_);
    dt_ = initial_step();
  }

  const State& state() const { return x_; }
  const State& deriv() const { return f_; }
  Real time() const { return t_; }
  const LorenzSystem<N>& system() const { return sys_; }

  /// Advances by one accepted step, never past t_limit. Returns the record.
  StepRecord<N> step(Real t_limit) {
    StepRecord<N> rec;
    rec.t0 = t_;
    rec.x0 = x_;
    rec.f0 = f_;
    const Real remaining = t_limit - t_;
    bool clamped = false;
    Real dt = std::min(dt_, cfg_.max_step);
    if (dt >= remaining) {
      dt = remaining;
      clamped = true;
    }
    State xn, fn;
    for (int fails = 0;; ++fails) {
      Real t = t_;
      Real trial = dt;
      const auto res = controlled_.try_step(sys_, x_, f_, t, xn, fn, trial);
      if (res == odeint::success) {
        if (clamped) t = t_limit;  // land exactly
        t_ = t;
        if (!clamped || trial > dt_) dt_ = trial;
        break;
      }
      dt = trial;
      clamped = false;
      if (dt < min_step() || fails > 200)
        throw NumericalError(ErrorKind::StepFailure,
                             "step size underflow at t=" + std::to_string(double(t_)));
    }
    x_ = xn;
    f_ = fn;
    check_escape(x_);
    rec.t1 = t_;
    rec.x1 = x_;
    rec.f1 = f_;
    return rec;
  }

  /// Integrates to exactly t_end.
  void run_to(Real t_end) {
    while (t_ < t_end) step(t_end);
  }

  /// Restarts from a given state/time (after event refinement).
  void reset(const State& x, Real t) {
    x_ = x;
    t_ = t;
    sys_(x_, f_, t_);
    controlled_.reset();
  }

  /// Single uncontrolled DOPRI5 step from (x, f) by dt.
  State single_step(const State& x, const State& f, Real dt) const {
    Stepper st;
    State out, fout;
    st.do_step(sys_, x, f, Real(0), out, fout, dt);
    return out;
  }

  /// Locates the zero of x[2] - level inside `rec` and returns the time and
  /// state refined to working precision by an exact step plus Newton.
  std::pair<Real, State> locate(const StepRecord<N>& rec, Real level) const {
    auto g = [&](Real t) { return rec.hermite(2, t) - level; };
    Real a = rec.t0, b = rec.t1;
    Real ga = rec.x0[2] - level, gb = rec.x1[2] - level;
    Real tr;
    if (ga == 0) {
      tr = a;
    } else if (gb == 0) {
      tr = b;
    } else {
      // The Hermite cubic matches the endpoint values, so the bracket holds.
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<Real>(std::numeric_limits<Real>::digits - 2);
      auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
      tr = (r.first + r.second) / 2;
    }
    State x = tr == rec.t0 ? rec.x0 : single_step(rec.x0, rec.f0, tr - rec.t0);
    Real t = tr;
    for (int k = 0; k < 3; ++k) {
      State f;
      sys_(x, f, t);
      const Real gval = x[2] - level;
      if (gval == 0 || f[2] == 0) break;
      const Real dtc = -gval / f[2];
      if (std::abs(dtc) < std::numeric_limits<Real>::epsilon() * (1 + std::abs(t)) * 1e-3L) break;
      x = single_step(x, f, dtc);
      t += dtc;
    }
    x[2] = level;
    return {t, x};
  }

 private:
  Real min_step() const { return 1e-15L * (1 + std::abs(t_)); }

  Real initial_step() const {
    Real fn = 0;
    for (std::size_t i = 0; i < 3; ++i) fn = std::max(fn, std::abs(f_[i]));
    Real dt = fn > 0 ? Real(1e-3) / (1 + fn / 100) : cfg_.max_step;
    return std::min(dt, cfg_.max_step);
  }

  void check_escape(const State& x) const {
    const Real n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (!(n <= cfg_.trapping_radius))
      throw NumericalError(ErrorKind::Escape, "trajectory left the trapping ball");
  }

  LorenzSystem<N> sys_;
  IntegratorConfig cfg_;
  decltype(odeint::make_controlled<Stepper>(Real(1), Real(1))) controlled_;
  State x_{};
  State f_{};
  Real t_ = 0;
  Real dt_ = 0;
};

}  // namespace implorenz::detail
