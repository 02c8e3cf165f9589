#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "distjet/curve_ops.hpp"
#include "distjet/curve_poly.hpp"
#include "distjet/recursion.hpp"

// Gradient flow of E = integral of 1 + eps*|A^k|^2 over a closed plane curve.
// The energy is discretized first (order-6 stencils, trapezoidal weights) and
// the gradient is the exact derivative of that discrete value, computed by a
// reverse sweep through the evaluation. Descent steps are therefore monotone
// by construction; the explicit stepper integrates mass-lumped node
// velocities with an adaptive Heun scheme.

namespace distjet {

enum class Stepper { kDescent, kExplicit };
enum class RunStatus { kFinished, kGradientStop, kSelfIntersection };

struct SelfIntersectionError : std::runtime_error {
  SelfIntersectionError() : std::runtime_error("curve is self-intersecting") {}
};

struct CurveState {
  std::vector<Vec2> nodes;
  double time = 0;
};

struct FlowConfig {
  int k = 3;
  double eps = 1.0;
  int nodes = 128;
  Stepper stepper = Stepper::kDescent;
  // Physical time horizon for the explicit stepper; accumulated step-size
  // budget (pseudo-time) for descent. Infinite by default so descent runs to
  // the gradient stop.
  double t_end = std::numeric_limits<double>::infinity();
  double grad_tol = 1e-6;  // stop when the L2 gradient per unit length drops below
  long long max_steps = 2000000;
  int redistribute_every = 50;
  int log_ticks = 1024;    // explicit stepper: target energy-log rows over [0, t_end]
  int snapshot_ticks = 32; // target snapshot count over the run
  std::uint64_t seed = 42; // echoed in outputs; consumed by callers that perturb states

  void validate() const {
    if (k < 3 || k > 6) throw std::invalid_argument("FlowConfig: k must be in 3..6");
    if (!(eps > 0)) throw std::invalid_argument("FlowConfig: eps must be positive");
    if (nodes < 16 || nodes < 4 * k)
      throw std::invalid_argument("FlowConfig: need at least max(16, 4k) nodes");
    if (!(t_end > 0)) throw std::invalid_argument("FlowConfig: t_end must be positive");
    if (max_steps < 1 || redistribute_every < 1 || log_ticks < 1 || snapshot_ticks < 1)
      throw std::invalid_argument("FlowConfig: counters must be positive");
  }
};

// total = length_part + eps * curvature_part; the parts scale as lambda and
// lambda^(2(2-k)+1) under uniform dilation of the curve.
struct EnergyReport {
  double length_part = 0;
  double curvature_part = 0;
  double total = 0;
};

struct Snapshot {
  double time = 0;
  std::vector<Vec2> nodes;
};

struct LogRow {
  double time = 0;
  double energy = 0;
  double length = 0;
  double max_abs_curvature = 0;
  double radius_fit = 0;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<LogRow> log;
};

struct RunResult {
  RunStatus status = RunStatus::kFinished;
  long long steps = 0;
  long long rejected = 0;
  CurveState final_state;
  Trajectory trajectory;
};

namespace detail {

// Flat monomial list for fast pointwise evaluation (at most four jet vars).
struct PolyEval {
  struct Mono {
    double coeff = 0;
    std::array<int, 4> exp{};
  };
  std::vector<Mono> monos;

  static PolyEval from(const PolyScalar& p) {
    if (p.max_var() >= 4) throw std::logic_error("PolyEval: too many jet variables");
    PolyEval pe;
    for (const auto& [e, c] : p.terms()) {
      Mono m;
      m.coeff = c;
      for (size_t l = 0; l < e.size(); ++l) m.exp[l] = e[l];
      pe.monos.push_back(m);
    }
    return pe;
  }

  double eval(const double* u) const {
    double sum = 0;
    for (const Mono& m : monos) {
      double t = m.coeff;
      for (int l = 0; l < 4; ++l)
        for (int i = 0; i < m.exp[l]; ++i) t *= u[l];
      sum += t;
    }
    return sum;
  }
};

struct FlowScratch {
  CurveGeometry geo;
  std::vector<double> w;                     // per-node |A^k|^2
  std::array<std::vector<double>, 4> dw;     // per-node partials by jet level
  std::array<std::vector<double>, 4> ubar;   // jet adjoints
  std::vector<double> spbar, q, qs;
  std::vector<Vec2> x1bar, x2bar, grad, velocity, tmpv;
  EnergyReport report;
};

}  // namespace detail

class FlowProblem {
 public:
  // eps = 0 is allowed here (pure length, the curve-shortening reference);
  // the public run configuration keeps eps strictly positive.
  FlowProblem(const RecursionTable& table, int k, double eps) : k_(k), eps_(eps) {
    if (k < 3 || k > 6) throw std::invalid_argument("FlowProblem: k must be in 3..6");
    if (!(eps >= 0)) throw std::invalid_argument("FlowProblem: eps must be nonnegative");
    const PolyScalar w = curvature_norm_poly(table, k);
    w_ = detail::PolyEval::from(w);
    jet_count_ = k - 2;
    for (int l = 0; l < jet_count_; ++l) dw_[l] = detail::PolyEval::from(w.partial(l));
    std::vector<int> top(jet_count_, 0);
    top[jet_count_ - 1] = 2;
    while (!top.empty() && top.back() == 0) top.pop_back();
    const auto it = w.terms().find(top);
    c_top_ = it != w.terms().end() ? it->second : 1.0;
  }

  int k() const { return k_; }
  double eps() const { return eps_; }
  double c_top() const { return c_top_; }

  EnergyReport energy(const CurveState& state) const {
    require_valid(state.nodes);
    detail::FlowScratch scr;
    return forward(state.nodes, scr);
  }

  std::vector<Vec2> gradient(const CurveState& state) const {
    require_valid(state.nodes);
    detail::FlowScratch scr;
    forward_reverse(state.nodes, scr);
    return scr.grad;
  }

  // L2(ds) norm of the mass-lumped gradient divided by curve length; the
  // descent and explicit steppers stop when this drops below grad_tol.
  double gradient_norm_per_length(const CurveState& state) const {
    require_valid(state.nodes);
    detail::FlowScratch scr;
    forward_reverse(state.nodes, scr);
    return stationarity(scr);
  }

  // Forward energy evaluation; fills geometry and per-node norms.
  EnergyReport forward(const std::vector<Vec2>& nodes, detail::FlowScratch& scr) const {
    curve_geometry(nodes, jet_count_, scr.geo);
    const int n = (int)nodes.size();
    scr.w.resize(n);
    for (int l = 0; l < jet_count_; ++l) scr.dw[l].resize(n);
    double len = 0, curv = 0;
    double u[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < jet_count_; ++l) u[l] = scr.geo.kappa[l][i];
      scr.w[i] = w_.eval(u);
      for (int l = 0; l < jet_count_; ++l) scr.dw[l][i] = dw_[l].eval(u);
      len += scr.geo.speed[i];
      curv += scr.w[i] * scr.geo.speed[i];
    }
    scr.report.length_part = len * scr.geo.dp;
    scr.report.curvature_part = curv * scr.geo.dp;
    scr.report.total = scr.report.length_part + eps_ * scr.report.curvature_part;
    return scr.report;
  }

  // Exact derivative of the discrete energy with respect to the nodes,
  // obtained by reversing the forward sweep. Stencil transposes use the
  // symmetry of the weights: the first-derivative stencil is odd, the
  // second-derivative stencil even.
  void forward_reverse(const std::vector<Vec2>& nodes, detail::FlowScratch& scr) const {
    forward(nodes, scr);
    const int n = (int)nodes.size();
    const double dp = scr.geo.dp;
    const CurveGeometry& g = scr.geo;

    for (int l = 0; l < jet_count_; ++l) scr.ubar[l].assign(n, 0.0);
    scr.spbar.assign(n, 0.0);
    scr.x1bar.assign(n, Vec2{});
    scr.x2bar.assign(n, Vec2{});

    for (int i = 0; i < n; ++i) {
      const double wbar = eps_ * g.speed[i] * dp;
      scr.spbar[i] = (1.0 + eps_ * scr.w[i]) * dp;
      for (int l = 0; l < jet_count_; ++l) scr.ubar[l][i] = wbar * scr.dw[l][i];
    }

    // kappa_l = S1(kappa_{l-1}) / (dp * speed), peeled from the top level.
    for (int l = jet_count_ - 1; l >= 1; --l) {
      scr.q.resize(n);
      for (int i = 0; i < n; ++i) {
        scr.q[i] = scr.ubar[l][i] / (dp * g.speed[i]);
        scr.spbar[i] -= scr.ubar[l][i] * g.kappa[l][i] / g.speed[i];
      }
      detail::apply_stencil(scr.q, detail::kD1, -1.0, scr.qs);
      for (int i = 0; i < n; ++i) scr.ubar[l - 1][i] += scr.qs[i];
    }

    // kappa_0 = cross(x1, x2) / speed^3.
    for (int i = 0; i < n; ++i) {
      const double kbar = scr.ubar[0][i];
      const double sp = g.speed[i];
      const double inv3 = 1.0 / (sp * sp * sp);
      scr.x1bar[i] += kbar * inv3 * Vec2{g.x2[i].y, -g.x2[i].x};
      scr.x2bar[i] += kbar * inv3 * Vec2{-g.x1[i].y, g.x1[i].x};
      scr.spbar[i] -= 3.0 * kbar * g.kappa[0][i] / sp;
    }

    // speed = |x1|.
    for (int i = 0; i < n; ++i) scr.x1bar[i] += (scr.spbar[i] / g.speed[i]) * g.x1[i];

    // x1 = S1(x)/dp (odd stencil), x2 = S2(x)/dp^2 (even stencil).
    detail::apply_stencil(scr.x1bar, detail::kD1, -(double)n, scr.grad);
    detail::apply_stencil(scr.x2bar, detail::kD2, (double)n * n, scr.tmpv);
    for (int i = 0; i < n; ++i) scr.grad[i] += scr.tmpv[i];
  }

  // Mass-lumped node velocity -grad / (speed * dp): the L2(ds) gradient flow.
  void velocity(detail::FlowScratch& scr) const {
    const int n = (int)scr.grad.size();
    scr.velocity.resize(n);
    for (int i = 0; i < n; ++i)
      scr.velocity[i] = (-1.0 / (scr.geo.speed[i] * scr.geo.dp)) * scr.grad[i];
  }

  double stationarity(const detail::FlowScratch& scr) const {
    const int n = (int)scr.grad.size();
    const double dp = scr.geo.dp;
    double sum = 0, len = 0;
    for (int i = 0; i < n; ++i) {
      const Vec2 v = (1.0 / (scr.geo.speed[i] * dp)) * scr.grad[i];
      sum += dot(v, v) * scr.geo.speed[i] * dp;
      len += scr.geo.speed[i] * dp;
    }
    return std::sqrt(sum) / len;
  }

  // Heun stability bound from the linearized symbol: the length part
  // contributes q^2, the top curvature jet 2*c_top*eps*amp*q^(2k-2) at the
  // grid's highest frequency q = pi/min spacing.
  double stable_dt(const detail::FlowScratch& scr) const {
    const int n = (int)scr.geo.speed.size();
    double ds_min = std::numeric_limits<double>::infinity();
    double kmax = 0;
    for (int i = 0; i < n; ++i) {
      ds_min = std::min(ds_min, scr.geo.speed[i] * scr.geo.dp);
      kmax = std::max(kmax, std::abs(scr.geo.kappa[0][i]));
    }
    const double q = M_PI / ds_min;
    double amp = 1.0;
    for (int i = 0; i < 2 * (k_ - 3); ++i) amp *= 1.0 + kmax;
    double qh = 1.0;
    for (int i = 0; i < 2 * k_ - 2; ++i) qh *= q;
    return 1.0 / (q * q + 2.0 * c_top_ * eps_ * amp * qh);
  }

  void require_valid(const std::vector<Vec2>& nodes) const {
    if ((int)nodes.size() < 16 || (int)nodes.size() < 4 * k_)
      throw std::invalid_argument("FlowProblem: need at least max(16, 4k) nodes");
    if (self_intersects(nodes)) throw SelfIntersectionError();
  }

 private:
  int k_;
  double eps_;
  int jet_count_;
  double c_top_ = 1.0;
  detail::PolyEval w_;
  std::array<detail::PolyEval, 4> dw_;
};

namespace detail {

inline LogRow make_log_row(double time, const EnergyReport& rep, const FlowScratch& scr,
                           const std::vector<Vec2>& nodes) {
  LogRow row;
  row.time = time;
  row.energy = rep.total;
  row.length = rep.length_part;
  row.max_abs_curvature = 0;
  for (double v : scr.geo.kappa[0]) row.max_abs_curvature = std::max(row.max_abs_curvature, std::abs(v));
  row.radius_fit = fit_circle(nodes).radius;
  return row;
}

// Keeps snapshot memory bounded: once over budget, drop every other snapshot
// and double the recording stride.
struct SnapshotKeeper {
  int budget;
  long long stride = 1;
  std::vector<Snapshot>& out;

  void offer(long long step, double time, const std::vector<Vec2>& nodes) {
    if (step % stride != 0) return;
    out.push_back({time, nodes});
    if ((int)out.size() > 2 * budget) {
      std::vector<Snapshot> kept;
      for (size_t i = 0; i < out.size(); i += 2) kept.push_back(std::move(out[i]));
      out = std::move(kept);
      stride *= 2;
    }
  }
};

// Constant-coefficient symmetric circulant operator, diagonalized by the
// discrete Fourier basis. Eigenvalues come straight from the generator row;
// solves go through a direct O(n^2) transform, which is cheap at curve sizes.
struct CirculantSolver {
  int n = 0;
  std::vector<double> eig, cs, sn;

  void build(const std::vector<double>& row) {
    n = (int)row.size();
    cs.resize(n);
    sn.resize(n);
    for (int j = 0; j < n; ++j) {
      cs[j] = std::cos(2 * M_PI * j / n);
      sn[j] = std::sin(2 * M_PI * j / n);
    }
    eig.assign(n, 0.0);
    for (int m = 0; m < n; ++m)
      for (int j = 0; j < n; ++j) eig[m] += row[j] * cs[(int)(((long long)m * j) % n)];
  }

  void solve(const std::vector<Vec2>& v, std::vector<Vec2>& out) const {
    std::vector<Vec2> re(n), im(n);
    for (int m = 0; m < n; ++m) {
      Vec2 a{}, b{};
      for (int i = 0; i < n; ++i) {
        const int idx = (int)(((long long)m * i) % n);
        a += cs[idx] * v[i];
        b += sn[idx] * v[i];
      }
      re[m] = (1.0 / (n * eig[m])) * a;
      im[m] = (1.0 / (n * eig[m])) * b;
    }
    out.assign(n, Vec2{});
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) {
        const int idx = (int)(((long long)m * i) % n);
        out[i] += cs[idx] * re[m] + sn[idx] * im[m];
      }
  }
};

// Generator row for the descent preconditioner: a constant-coefficient
// surrogate of the energy Hessian around a curve of mean speed sp_ref,
//   alpha0 + (dp/sp) (-D2) + 2 c_top eps (dp/sp^(2k-3)) (-D2)^(k-1),
// with alpha0 > 0 keeping the q = 0 modes invertible. All three pieces have
// nonnegative symbol, so the operator is positive definite and directions
// solved through it are descent directions.
inline std::vector<double> preconditioner_row(int n, int k, double eps, double c_top,
                                              double dp, double sp_ref) {
  std::vector<double> base(7), pow_row = {1.0};
  for (int j = 0; j < 7; ++j) base[j] = -kD2[j] * (double)n * n;
  for (int rep = 0; rep < k - 1; ++rep) {
    std::vector<double> next(pow_row.size() + 6, 0.0);
    for (size_t a = 0; a < pow_row.size(); ++a)
      for (int b = 0; b < 7; ++b) next[a + b] += pow_row[a] * base[b];
    pow_row = std::move(next);
  }
  std::vector<double> row(n, 0.0);
  const double alpha0 = dp * (2 * M_PI) * (2 * M_PI) / sp_ref;
  row[0] = alpha0;
  const int half1 = 3, half2 = 3 * (k - 1);
  const double c1 = dp / sp_ref;
  double c2 = 2.0 * c_top * eps * dp;
  for (int i = 0; i < 2 * k - 3; ++i) c2 /= sp_ref;
  for (int j = 0; j < 7; ++j) row[((j - half1) % n + n) % n] += c1 * base[j];
  for (size_t j = 0; j < pow_row.size(); ++j)
    row[(((int)j - half2) % n + n) % n] += c2 * pow_row[j];
  return row;
}

inline RunResult run_descent(const FlowProblem& prob, const FlowConfig& cfg,
                             std::vector<Vec2> nodes) {
  RunResult res;
  FlowScratch scr;
  prob.forward_reverse(nodes, scr);
  EnergyReport rep = scr.report;
  std::vector<Vec2> g = scr.grad;
  double t = 0;

  res.trajectory.log.push_back(make_log_row(0.0, rep, scr, nodes));
  SnapshotKeeper snaps{cfg.snapshot_ticks, 1, res.trajectory.snapshots};
  snaps.offer(0, 0.0, nodes);

  std::vector<Vec2> d, cand;
  CirculantSolver solver;
  double alpha_prev = 0.25;
  FlowScratch trial;

  while (res.steps < cfg.max_steps && t < cfg.t_end) {
    if (prob.stationarity(scr) < cfg.grad_tol) {
      res.status = RunStatus::kGradientStop;
      break;
    }

    const int n = (int)nodes.size();
    double ds_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) ds_min = std::min(ds_min, scr.geo.speed[i] * scr.geo.dp);

    solver.build(preconditioner_row(n, prob.k(), prob.eps(), prob.c_top(), scr.geo.dp,
                                    rep.length_part));
    solver.solve(g, d);
    double slope = 0, dmax = 0;
    for (int i = 0; i < n; ++i) {
      slope += dot(d[i], g[i]);
      dmax = std::max({dmax, std::abs(d[i].x), std::abs(d[i].y)});
    }

    double alpha = std::min(1.0, 2 * alpha_prev);
    alpha = std::min(alpha, 0.25 * ds_min / (dmax + 1e-300));
    bool accepted = false;
    for (int half = 0; half < 60 && !accepted; ++half) {
      cand.resize(n);
      for (int i = 0; i < n; ++i) cand[i] = nodes[i] - alpha * d[i];
      EnergyReport trep;
      try {
        trep = prob.forward(cand, trial);
      } catch (const std::invalid_argument&) {
        alpha /= 2;
        continue;
      }
      if (trep.total <= rep.total - 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha /= 2;
    }
    if (!accepted) {
      res.status = RunStatus::kGradientStop;
      break;
    }
    if (self_intersects(cand)) {
      res.status = RunStatus::kSelfIntersection;
      break;
    }

    alpha_prev = alpha;
    nodes.swap(cand);
    t += alpha;
    ++res.steps;

    prob.forward_reverse(nodes, scr);
    rep = scr.report;
    g = scr.grad;

    if (res.steps % cfg.redistribute_every == 0) {
      std::vector<Vec2> redist = resample_arclength(nodes);
      EnergyReport rrep;
      bool ok = !self_intersects(redist);
      if (ok) {
        try {
          rrep = prob.forward(redist, trial);
        } catch (const std::invalid_argument&) {
          ok = false;
        }
      }
      if (ok && rrep.total <= rep.total) {
        nodes.swap(redist);
        prob.forward_reverse(nodes, scr);
        rep = scr.report;
        g = scr.grad;
        alpha_prev = 0.25;
      }
    }

    res.trajectory.log.push_back(make_log_row(t, rep, scr, nodes));
    snaps.offer(res.steps, t, nodes);
  }

  res.final_state = {std::move(nodes), t};
  if (res.trajectory.snapshots.empty() ||
      res.trajectory.snapshots.back().time != t)
    res.trajectory.snapshots.push_back({t, res.final_state.nodes});
  return res;
}

inline RunResult run_explicit(const FlowProblem& prob, const FlowConfig& cfg,
                              std::vector<Vec2> nodes) {
  RunResult res;
  FlowScratch scr, scr2;
  const int n = (int)nodes.size();
  const double rtol = 1e-5, atol = 1e-9;

  prob.forward_reverse(nodes, scr);
  prob.velocity(scr);
  double t = 0;
  double dt = 0.25 * prob.stable_dt(scr);

  const double log_dt = cfg.t_end / cfg.log_ticks;
  const double snap_dt = cfg.t_end / cfg.snapshot_ticks;
  double next_log = 0, next_snap = 0;
  res.trajectory.log.push_back(make_log_row(0.0, scr.report, scr, nodes));
  next_log += log_dt;
  res.trajectory.snapshots.push_back({0.0, nodes});
  next_snap += snap_dt;

  std::vector<Vec2> xe(n), xh(n);
  int consecutive_rejects = 0;
  const double dt_floor =
      1e-18 * (std::isfinite(cfg.t_end) ? std::max(1.0, cfg.t_end) : 1.0);

  while (res.steps < cfg.max_steps && t < cfg.t_end * (1 - 1e-15)) {
    if (prob.stationarity(scr) < cfg.grad_tol) {
      res.status = RunStatus::kGradientStop;
      break;
    }
    dt = std::min({dt, prob.stable_dt(scr), cfg.t_end - t});
    if (!(dt > 0) || dt < dt_floor)
      throw std::runtime_error("explicit stepper: step size collapsed");

    bool ok = true;
    for (int i = 0; i < n; ++i) xe[i] = nodes[i] + dt * scr.velocity[i];
    try {
      prob.forward_reverse(xe, scr2);
      prob.velocity(scr2);
    } catch (const std::invalid_argument&) {
      ok = false;
    }
    double err = 0;
    if (ok) {
      double scale = 1.0;
      for (int i = 0; i < n; ++i)
        scale = std::max({scale, std::abs(nodes[i].x), std::abs(nodes[i].y)});
      for (int i = 0; i < n; ++i) {
        xh[i] = nodes[i] + (dt / 2) * (scr.velocity[i] + scr2.velocity[i]);
        err = std::max(err, norm(xh[i] - xe[i]) / (atol + rtol * scale));
      }
    }
    if (!ok || err > 1.0) {
      dt *= ok ? std::max(0.2, 0.9 / std::sqrt(err)) : 0.25;
      ++res.rejected;
      if (++consecutive_rejects > 200)
        throw std::runtime_error("explicit stepper: cannot make progress");
      continue;
    }
    consecutive_rejects = 0;

    if (self_intersects(xh)) {
      res.status = RunStatus::kSelfIntersection;
      break;
    }
    nodes.swap(xh);
    t += dt;
    ++res.steps;
    dt *= std::min(2.0, 0.9 / std::sqrt(std::max(err, 1e-12)));

    prob.forward_reverse(nodes, scr);
    prob.velocity(scr);

    if (res.steps % cfg.redistribute_every == 0) {
      std::vector<Vec2> redist = resample_arclength(nodes);
      if (!self_intersects(redist)) {
        nodes.swap(redist);
        prob.forward_reverse(nodes, scr);
        prob.velocity(scr);
      }
    }

    while (t >= next_log - 1e-15 * cfg.t_end) {
      res.trajectory.log.push_back(make_log_row(t, scr.report, scr, nodes));
      next_log += log_dt;
    }
    while (t >= next_snap - 1e-15 * cfg.t_end) {
      res.trajectory.snapshots.push_back({t, nodes});
      next_snap += snap_dt;
    }
  }

  res.final_state = {std::move(nodes), t};
  if (res.trajectory.log.empty() || res.trajectory.log.back().time != t) {
    prob.forward(res.final_state.nodes, scr);
    res.trajectory.log.push_back(make_log_row(t, scr.report, scr, res.final_state.nodes));
  }
  if (res.trajectory.snapshots.empty() ||
      res.trajectory.snapshots.back().time != t)
    res.trajectory.snapshots.push_back({t, res.final_state.nodes});
  return res;
}

inline RunResult run_loop(const FlowProblem& prob, const FlowConfig& cfg,
                          std::vector<Vec2> initial) {
  if ((int)initial.size() != cfg.nodes)
    throw std::invalid_argument("run: initial node count does not match the configuration");
  if (self_intersects(initial)) throw SelfIntersectionError();
  return cfg.stepper == Stepper::kDescent ? run_descent(prob, cfg, std::move(initial))
                                          : run_explicit(prob, cfg, std::move(initial));
}

}  // namespace detail

inline RunResult run(const RecursionTable& table, const FlowConfig& cfg,
                     std::vector<Vec2> initial) {
  cfg.validate();
  FlowProblem prob(table, cfg.k, cfg.eps);
  return detail::run_loop(prob, cfg, std::move(initial));
}

struct McfRow {
  double eps = 0;
  double sup_deviation = 0;
};

struct McfCompareResult {
  bool circle_reference = false;
  double initial_radius = 0;
  std::vector<McfRow> rows;
  std::vector<RunResult> runs;
};

namespace detail {

inline double point_polygon_distance(Vec2 p, const std::vector<Vec2>& poly) {
  const int n = (int)poly.size();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double u = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    best = std::min(best, norm(p - (a + u * ab)));
  }
  return best;
}

inline double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double d = 0;
  for (const Vec2& p : a) d = std::max(d, point_polygon_distance(p, b));
  for (const Vec2& p : b) d = std::max(d, point_polygon_distance(p, a));
  return d;
}

}  // namespace detail

// Runs the flow once per eps (strictly decreasing list) from a common initial
// curve and reports the sup-norm deviation from the curve-shortening
// reference: the shrinking-circle law when the initial curve is a circle, a
// pure-length explicit run otherwise.
inline McfCompareResult mcf_compare(const RecursionTable& table, const FlowConfig& base,
                                    const std::vector<Vec2>& initial,
                                    const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw std::invalid_argument("mcf_compare: empty eps list");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0)) throw std::invalid_argument("mcf_compare: eps must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("mcf_compare: eps list must be strictly decreasing");
  }
  if (!std::isfinite(base.t_end))
    throw std::invalid_argument("mcf_compare: needs a finite time window");

  FlowConfig cfg = base;
  cfg.stepper = Stepper::kExplicit;
  cfg.eps = eps_list.front();
  // The comparison needs every run to cover the whole window, including
  // stationary curves whose velocity is already below any gradient tolerance.
  cfg.grad_tol = 0.0;
  cfg.validate();

  McfCompareResult out;
  const CircleFit fit = fit_circle(initial);
  double circle_dev = 0;
  for (const Vec2& p : initial)
    circle_dev = std::max(circle_dev, std::abs(norm(p - fit.center) - fit.radius));
  out.circle_reference = fit.radius > 0 && circle_dev < 1e-9 * fit.radius;
  out.initial_radius = fit.radius;

  RunResult ref;
  if (!out.circle_reference) {
    FlowProblem mcf(table, cfg.k, 0.0);
    ref = detail::run_loop(mcf, cfg, initial);
  }

  for (double eps : eps_list) {
    cfg.eps = eps;
    RunResult run_eps = run(table, cfg, initial);
    double dev = 0;
    if (out.circle_reference) {
      const double r0 = out.initial_radius;
      for (const LogRow& row : run_eps.trajectory.log) {
        const double r_ref = std::sqrt(std::max(0.0, r0 * r0 - 2 * row.time));
        dev = std::max(dev, std::abs(row.radius_fit - r_ref));
      }
    } else {
      const size_t count = std::min(run_eps.trajectory.snapshots.size(),
                                    ref.trajectory.snapshots.size());
      for (size_t i = 1; i < count; ++i)
        dev = std::max(dev, detail::hausdorff(run_eps.trajectory.snapshots[i].nodes,
                                              ref.trajectory.snapshots[i].nodes));
    }
    out.rows.push_back({eps, dev});
    out.runs.push_back(std::move(run_eps));
  }
  return out;
}

}  // namespace distjet
