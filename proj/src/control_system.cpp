#include "varoc/control_system.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace varoc {

void OCProblem::validate() const {
  require(system.n > 0 && system.m > 0 && system.m <= system.n,
          "control system dimensions must satisfy 0 < m <= n");
  require(q0.size() == system.n && v0.size() == system.n,
          "initial state dimension mismatch");
  require(horizon > 0.0, "horizon must be positive");
  require(static_cast<bool>(system.f) && static_cast<bool>(system.rho) &&
              static_cast<bool>(system.metric),
          "system evaluation maps must be set");
  require(static_cast<bool>(terminal.phi) && static_cast<bool>(terminal.dphi_dq) &&
              static_cast<bool>(terminal.dphi_dv),
          "terminal cost maps must be set");
}

Vec metric_solve(const ControlSystem& sys, const Vec& q, const Vec& rhs) {
  if (sys.metric_is_scalar()) {
    const double g0 = *sys.constant_metric_scalar;
    if (!(g0 > 0.0)) throw MetricSingularError("constant control metric is not positive");
    return rhs / g0;
  }
  Mat g = sys.metric(q);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw MetricSingularError("control metric g(q) is not positive definite");
  return llt.solve(rhs);
}

Mat eval_b(const ControlSystem& sys, const Vec& q) {
  Mat r = sys.rho(q);
  require(r.rows() == sys.n && r.cols() == sys.m, "rho(q) has wrong shape");
  Mat ginv_rt = Mat(sys.m, sys.n);
  if (sys.metric_is_scalar()) {
    const double g0 = *sys.constant_metric_scalar;
    if (!(g0 > 0.0)) throw MetricSingularError("constant control metric is not positive");
    ginv_rt = r.transpose() / g0;
  } else {
    Eigen::LLT<Mat> llt(sys.metric(q));
    if (llt.info() != Eigen::Success)
      throw MetricSingularError("control metric g(q) is not positive definite");
    ginv_rt = llt.solve(r.transpose());
  }
  return r * ginv_rt;
}

Vec minimising_control(const ControlSystem& sys, const Vec& q, const Vec& lam) {
  return metric_solve(sys, q, sys.rho(q).transpose() * lam);
}

Vec grad_lam_rho_u(const ControlSystem& sys, const Vec& q, const Vec& lam,
                   const Vec& u) {
  Vec out(sys.n);
  Vec w = Vec::Zero(sys.n);
  for (int j = 0; j < sys.n; ++j) {
    w(j) = 1.0;
    out(j) = lam.dot(sys.drho_dq_action(q, u, w));
    w(j) = 0.0;
  }
  return out;
}

Vec grad_u_metric_u(const ControlSystem& sys, const Vec& q, const Vec& u) {
  if (sys.metric_is_scalar()) return Vec::Zero(sys.n);
  Vec out(sys.n);
  Vec w = Vec::Zero(sys.n);
  for (int j = 0; j < sys.n; ++j) {
    w(j) = 1.0;
    out(j) = sys.dmetric_dq_action(q, u, u, w);
    w(j) = 0.0;
  }
  return out;
}

Vec eval_grad_b(const ControlSystem& sys, const Vec& q, const Vec& lam) {
  Vec ustar = minimising_control(sys, q, lam);
  return 2.0 * grad_lam_rho_u(sys, q, lam, ustar) - grad_u_metric_u(sys, q, ustar);
}

namespace {

double fd_step_for(double x) { return kFdFallbackStep * (1.0 + std::abs(x)); }

// Central difference of a vector-valued map along coordinate j of x.
template <typename F>
Vec central_diff(const F& eval, const Vec& x, int j) {
  Vec xp = x, xm = x;
  const double d = fd_step_for(x(j));
  xp(j) += d;
  xm(j) -= d;
  return (eval(xp) - eval(xm)) / (2.0 * d);
}

}  // namespace

void fill_missing_derivatives_with_fd(ControlSystem& sys) {
  if (!sys.df_dq) {
    auto f = sys.f;
    int n = sys.n;
    sys.df_dq = [f, n](const Vec& q, const Vec& v) {
      Mat out(n, n);
      for (int j = 0; j < n; ++j)
        out.col(j) = central_diff([&](const Vec& qq) { return f(qq, v); }, q, j);
      return out;
    };
  }
  if (!sys.df_dv) {
    auto f = sys.f;
    int n = sys.n;
    sys.df_dv = [f, n](const Vec& q, const Vec& v) {
      Mat out(n, n);
      for (int j = 0; j < n; ++j)
        out.col(j) = central_diff([&](const Vec& vv) { return f(q, vv); }, v, j);
      return out;
    };
  }
  if (!sys.drho_dq_action) {
    auto rho = sys.rho;
    sys.drho_dq_action = [rho](const Vec& q, const Vec& u, const Vec& w) {
      // Directional central difference of rho along w, applied to u.
      const double d = kFdFallbackStep * (1.0 + q.cwiseAbs().maxCoeff());
      Mat drho = (rho(q + d * w) - rho(q - d * w)) / (2.0 * d);
      return Vec(drho * u);
    };
  }
  if (!sys.dmetric_dq_action) {
    auto metric = sys.metric;
    sys.dmetric_dq_action = [metric](const Vec& q, const Vec& a, const Vec& b,
                                     const Vec& w) {
      const double d = kFdFallbackStep * (1.0 + q.cwiseAbs().maxCoeff());
      double fp = a.dot(metric(q + d * w) * b);
      double fm = a.dot(metric(q - d * w) * b);
      return (fp - fm) / (2.0 * d);
    };
  }
}

TerminalCost terminal_cost_with_fd(std::function<double(const Vec&, const Vec&)> phi) {
  TerminalCost tc;
  tc.phi = phi;
  tc.dphi_dq = [phi](const Vec& q, const Vec& v) {
    Vec out(q.size());
    for (int j = 0; j < q.size(); ++j) {
      Vec qp = q, qm = q;
      const double d = fd_step_for(q(j));
      qp(j) += d;
      qm(j) -= d;
      out(j) = (phi(qp, v) - phi(qm, v)) / (2.0 * d);
    }
    return out;
  };
  tc.dphi_dv = [phi](const Vec& q, const Vec& v) {
    Vec out(v.size());
    for (int j = 0; j < v.size(); ++j) {
      Vec vp = v, vm = v;
      const double d = fd_step_for(v(j));
      vp(j) += d;
      vm(j) -= d;
      out(j) = (phi(q, vp) - phi(q, vm)) / (2.0 * d);
    }
    return out;
  };
  return tc;
}

namespace {

double rel_err(const Mat& analytic, const Mat& fd) {
  double denom = 1.0 + fd.cwiseAbs().maxCoeff();
  return (analytic - fd).cwiseAbs().maxCoeff() / denom;
}

void push_entry(DerivativeReport& rep, const std::string& name, int probe,
                double err) {
  rep.entries.push_back({name, probe, err});
  rep.max_rel_error = std::max(rep.max_rel_error, err);
}

}  // namespace

DerivativeReport check_derivatives(const ControlSystem& sys,
                                   const std::vector<std::pair<Vec, Vec>>& probes,
                                   double tol) {
  DerivativeReport rep;
  rep.tol = tol;
  const int n = sys.n;
  const int m = sys.m;
  // Fixed direction set keeps the report deterministic.
  for (int p = 0; p < static_cast<int>(probes.size()); ++p) {
    const Vec& q = probes[p].first;
    const Vec& v = probes[p].second;

    if (sys.df_dq) {
      Mat fd(n, n);
      for (int j = 0; j < n; ++j)
        fd.col(j) = central_diff([&](const Vec& qq) { return sys.f(qq, v); }, q, j);
      push_entry(rep, "df_dq", p, rel_err(sys.df_dq(q, v), fd));
    }
    if (sys.df_dv) {
      Mat fd(n, n);
      for (int j = 0; j < n; ++j)
        fd.col(j) = central_diff([&](const Vec& vv) { return sys.f(q, vv); }, v, j);
      push_entry(rep, "df_dv", p, rel_err(sys.df_dv(q, v), fd));
    }
    if (sys.drho_dq_action) {
      // Probe the action with unit u-vectors and unit directions.
      for (int c = 0; c < m; ++c) {
        Vec u = Vec::Zero(m);
        u(c) = 1.0;
        Mat analytic(n, n), fd(n, n);
        Vec w = Vec::Zero(n);
        for (int j = 0; j < n; ++j) {
          w(j) = 1.0;
          analytic.col(j) = sys.drho_dq_action(q, u, w);
          fd.col(j) = central_diff([&](const Vec& qq) { return Vec(sys.rho(qq) * u); }, q, j);
          w(j) = 0.0;
        }
        push_entry(rep, "drho_dq[u=e" + std::to_string(c) + "]", p,
                   rel_err(analytic, fd));
      }
    }
    if (sys.dmetric_dq_action && !sys.metric_is_scalar()) {
      Vec u = Vec::Constant(m, 1.0);
      Vec analytic(n), fd(n);
      Vec w = Vec::Zero(n);
      for (int j = 0; j < n; ++j) {
        w(j) = 1.0;
        analytic(j) = sys.dmetric_dq_action(q, u, u, w);
        Vec g = central_diff(
            [&](const Vec& qq) { return Vec((sys.metric(qq) * u).transpose() * u); }, q, j);
        fd(j) = g(0);
        w(j) = 0.0;
      }
      push_entry(rep, "dmetric_dq", p, rel_err(analytic, fd));
    }
  }
  rep.passed = rep.max_rel_error <= tol;
  return rep;
}

DerivativeReport check_terminal_cost(const TerminalCost& cost,
                                     const std::vector<std::pair<Vec, Vec>>& probes,
                                     double tol) {
  DerivativeReport rep;
  rep.tol = tol;
  for (int p = 0; p < static_cast<int>(probes.size()); ++p) {
    const Vec& q = probes[p].first;
    const Vec& v = probes[p].second;
    const int n = static_cast<int>(q.size());
    Vec fdq(n), fdv(n);
    for (int j = 0; j < n; ++j) {
      Vec qp = q, qm = q;
      double d = fd_step_for(q(j));
      qp(j) += d;
      qm(j) -= d;
      fdq(j) = (cost.phi(qp, v) - cost.phi(qm, v)) / (2.0 * d);
      Vec vp = v, vm = v;
      d = fd_step_for(v(j));
      vp(j) += d;
      vm(j) -= d;
      fdv(j) = (cost.phi(q, vp) - cost.phi(q, vm)) / (2.0 * d);
    }
    push_entry(rep, "dphi_dq", p, rel_err(cost.dphi_dq(q, v), fdq));
    push_entry(rep, "dphi_dv", p, rel_err(cost.dphi_dv(q, v), fdv));
  }
  rep.passed = rep.max_rel_error <= tol;
  return rep;
}

}  // namespace varoc
