#include "pingtsvm/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace pingtsvm {

namespace {

struct Residuals {
  double primal = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

Residuals measure(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                  const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                  const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  Residuals r;
  r.stationarity = (P * x + q + G.transpose() * lambda).cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    const double slack = G.row(i).dot(x) - h(i);
    r.primal = std::max(r.primal, slack);
    r.complementarity = std::max(r.complementarity, std::abs(lambda(i) * slack));
  }
  r.primal = std::max(r.primal, 0.0);
  return r;
}

// LDLT with escalating diagonal regularisation; the fallback sequence is
// fixed, so the path taken is a pure function of the inputs.
class RobustLdlt {
 public:
  void compute(const Eigen::MatrixXd& K) {
    const double scale = std::max(1.0, K.diagonal().cwiseAbs().maxCoeff());
    double bump = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      if (attempt == 0) {
        ldlt_.compute(K);
      } else {
        bump = (bump == 0.0) ? 1e-13 * scale : bump * 100.0;
        Eigen::MatrixXd Kb = K;
        Kb.diagonal().array() += bump;
        ldlt_.compute(Kb);
      }
      if (ldlt_.info() != Eigen::Success) continue;
      probe_ = ldlt_.solve(Eigen::VectorXd::Ones(K.rows()));
      if (probe_.allFinite()) return;
    }
    // Every attempt failed; leave the last factorisation in place. Solves
    // will produce non-finite values that the caller's guards pick up.
  }

  Eigen::VectorXd solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = ldlt_.solve(rhs);
    if (!x.allFinite()) return x;
    // Iterative refinement against the unregularised matrix, stopped once
    // the residual no longer shrinks.
    double prev = (rhs - K * x).cwiseAbs().maxCoeff();
    for (int round = 0; round < 3 && prev > 0.0; ++round) {
      const Eigen::VectorXd corr = ldlt_.solve(rhs - K * x);
      if (!corr.allFinite()) break;
      const Eigen::VectorXd candidate = x + corr;
      const double next = (rhs - K * candidate).cwiseAbs().maxCoeff();
      if (next >= prev) break;
      x = candidate;
      prev = next;
    }
    return x;
  }

 private:
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::VectorXd probe_;
};

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  return alpha;
}

void validate(const QpProblem& p, const QpSettings& s) {
  const auto n = p.P.rows();
  if (n < 1 || p.P.cols() != n)
    throw std::invalid_argument("solve_qp: P must be square and nonempty");
  if (p.q.size() != n)
    throw std::invalid_argument("solve_qp: q length does not match P");
  if (p.G.rows() != p.h.size() || (p.G.rows() > 0 && p.G.cols() != n))
    throw std::invalid_argument("solve_qp: constraint shapes are inconsistent");
  if (!p.P.allFinite() || !p.q.allFinite() || !p.G.allFinite() || !p.h.allFinite())
    throw std::invalid_argument("solve_qp: non-finite problem data");
  const double pmax = std::max(1.0, p.P.cwiseAbs().maxCoeff());
  if ((p.P - p.P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * pmax)
    throw std::invalid_argument("solve_qp: P is not symmetric");
  if (!(s.tol_feas > 0.0) || !(s.tol_stat > 0.0) || !(s.tol_comp > 0.0))
    throw std::invalid_argument("solve_qp: tolerances must be positive");
  if (s.max_iter < 1) throw std::invalid_argument("solve_qp: max_iter must be >= 1");
  if (!(s.ridge >= 0.0)) throw std::invalid_argument("solve_qp: ridge must be >= 0");
}

/// Working-set polish: degenerate problems leave the interior-point path
/// crawling along a face of the feasible set without ever separating the
/// active constraints cleanly. Starting from the iterate, this runs a primal
/// active-set iteration: solve the equality-constrained QP on the working
/// set, walk toward that target no further than the first blocking
/// constraint (which then joins the set), and once the target is reached
/// drop the single most negative multiplier. Dropping or adding one row at a
/// time keeps the iteration from the add/drop thrash a batched update falls
/// into on degenerate faces. The final candidate is measured honestly and
/// accepted only when its own residuals certify, so a failed polish costs
/// nothing but the attempt.
struct PolishResult {
  bool certified = false;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  Residuals res;
};

PolishResult working_set_polish(const Eigen::MatrixXd& P,
                                const Eigen::VectorXd& q,
                                const Eigen::MatrixXd& G,
                                const Eigen::VectorXd& h,
                                const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& lambda0,
                                const QpSettings& settings) {
  PolishResult out;
  const Eigen::Index n = P.rows();
  const Eigen::Index m = G.rows();

  std::vector<char> in_set(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double slack = std::max(h(i) - G.row(i).dot(x0), 0.0);
    if (lambda0(i) > slack) in_set[static_cast<std::size_t>(i)] = 1;
  }

  Eigen::VectorXd x = x0;
  for (int round = 0; round < 200; ++round) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < m; ++i)
      if (in_set[static_cast<std::size_t>(i)]) active.push_back(i);
    const Eigen::Index k = static_cast<Eigen::Index>(active.size());

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = P;
    Eigen::VectorXd rhs(n + k);
    rhs.head(n) = -q;
    for (Eigen::Index j = 0; j < k; ++j) {
      kkt.block(0, n + j, n, 1) = G.row(active[j]).transpose();
      kkt.block(n + j, 0, 1, n) = G.row(active[j]);
      rhs(n + j) = h(active[j]);
    }

    // Minimum-norm least-squares solve; the working set may be linearly
    // dependent mid-iteration and a plain factorisation would fail on it.
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
    Eigen::VectorXd sol = cod.solve(rhs);
    if (!sol.allFinite()) return out;
    double prev = (rhs - kkt * sol).cwiseAbs().maxCoeff();
    for (int pass = 0; pass < 2 && prev > 0.0; ++pass) {
      const Eigen::VectorXd corr = cod.solve(rhs - kkt * sol);
      if (!corr.allFinite()) break;
      const Eigen::VectorXd candidate = sol + corr;
      const double next = (rhs - kkt * candidate).cwiseAbs().maxCoeff();
      if (next >= prev) break;
      sol = candidate;
      prev = next;
    }

    const Eigen::VectorXd target = sol.head(n);
    const Eigen::VectorXd step = target - x;
    const double step_size = step.cwiseAbs().maxCoeff();

    if (step_size <= 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
      // The working-set minimiser has been reached; its multipliers decide
      // whether a row must leave the set.
      const double lam_scale =
          std::max(1.0, k > 0 ? sol.tail(k).cwiseAbs().maxCoeff() : 0.0);
      Eigen::Index worst = -1;
      double worst_lambda = -1e-10 * lam_scale;
      for (Eigen::Index j = 0; j < k; ++j)
        if (sol(n + j) < worst_lambda) {
          worst_lambda = sol(n + j);
          worst = j;
        }
      if (worst >= 0) {
        in_set[static_cast<std::size_t>(active[worst])] = 0;
        continue;
      }

      out.x = target;
      out.lambda = Eigen::VectorXd::Zero(m);
      for (Eigen::Index j = 0; j < k; ++j)
        out.lambda(active[j]) = std::max(sol(n + j), 0.0);
      out.res = measure(P, q, G, h, out.x, out.lambda);
      out.certified = out.res.primal <= settings.tol_feas &&
                      out.res.stationarity <= settings.tol_stat &&
                      out.res.complementarity <= settings.tol_comp;
      return out;
    }

    // Ratio test over the rows outside the set: advance to the first one the
    // step would cross, and bring that row in.
    double alpha = 1.0;
    Eigen::Index blocker = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (in_set[static_cast<std::size_t>(i)]) continue;
      const double along = G.row(i).dot(step);
      if (along <= 1e-13 * step_size * std::max(1.0, G.row(i).cwiseAbs().maxCoeff()))
        continue;
      const double room = std::max(h(i) - G.row(i).dot(x), 0.0);
      const double ratio = room / along;
      if (ratio < alpha) {
        alpha = ratio;
        blocker = i;
      }
    }
    x += alpha * step;
    if (blocker >= 0) in_set[static_cast<std::size_t>(blocker)] = 1;
  }
  return out;
}

QpSolution solve_unconstrained(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                               const QpSettings& settings) {
  RobustLdlt ldlt;
  ldlt.compute(P);
  Eigen::VectorXd x = ldlt.solve(P, -q);
  if (!x.allFinite()) x = Eigen::VectorXd::Zero(q.size());

  QpSolution sol;
  sol.x = x;
  sol.multipliers = Eigen::VectorXd(0);
  sol.objective = 0.5 * x.dot(P * x) + q.dot(x);
  sol.stationarity_residual = (P * x + q).cwiseAbs().maxCoeff();
  sol.iterations = 1;
  sol.status = sol.stationarity_residual <= settings.tol_stat
                   ? QpStatus::Optimal
                   : QpStatus::MaxIterations;
  return sol;
}

QpSolution solve_inequality(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                            const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                            const QpSettings& settings) {
  const Eigen::Index n = P.rows();
  const Eigen::Index m = G.rows();

  // Beyond-tolerance targets: converging past the certificate thresholds
  // buys slack for the downstream oracle comparisons.
  const double tgt_feas = std::max(settings.tol_feas * 1e-3, 1e-12);
  const double tgt_stat = std::max(settings.tol_stat * 1e-4, 1e-11);
  const double tgt_comp = std::max(settings.tol_comp * 1e-4, 1e-11);
  const double gscale = std::max(1.0, G.cwiseAbs().maxCoeff());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s(m), lambda = Eigen::VectorXd::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i) s(i) = std::max(1.0, std::abs(h(i)));

  Eigen::VectorXd best_x = x, best_lambda = lambda;
  Residuals best_res = measure(P, q, G, h, x, lambda);
  double best_metric = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  int iter = 0;
  bool infeasible = false;

  Eigen::MatrixXd K(n, n);
  RobustLdlt ldlt;

  for (; iter < settings.max_iter; ++iter) {
    const Residuals res = measure(P, q, G, h, x, lambda);
    const double metric = std::max({res.primal / settings.tol_feas,
                                    res.stationarity / settings.tol_stat,
                                    res.complementarity / settings.tol_comp});
    if (metric < best_metric * 0.999) {
      best_metric = metric;
      best_x = x;
      best_lambda = lambda;
      best_res = res;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (res.primal <= tgt_feas && res.stationarity <= tgt_stat &&
        res.complementarity <= tgt_comp)
      break;

    const double mu = s.dot(lambda) / static_cast<double>(m);
    // Certified infeasibility: a nonnegative combination of the constraint
    // rows that cancels G but keeps h' lambda negative (Farkas direction).
    const bool stalled = since_improvement > 50;
    const double lambda_mass = lambda.lpNorm<1>();
    if (lambda_mass > 1e4 || stalled) {
      const Eigen::VectorXd dir = lambda / std::max(lambda_mass, 1e-300);
      if ((G.transpose() * dir).cwiseAbs().maxCoeff() <= 1e-8 * gscale &&
          h.dot(dir) <= -1e-8) {
        infeasible = true;
        break;
      }
    }
    if (stalled) break;  // not making progress; report the best iterate
    if (mu < 1e-16 && metric <= 1.0) break;

    Eigen::VectorXd d(m);
    for (Eigen::Index i = 0; i < m; ++i)
      d(i) = std::clamp(lambda(i) / s(i), 1e-14, 1e16);

    K.triangularView<Eigen::Lower>() = P;
    K.selfadjointView<Eigen::Lower>().rankUpdate(
        (d.cwiseSqrt().asDiagonal() * G).transpose(), 1.0);
    K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
    ldlt.compute(K);

    const Eigen::VectorXd r_d = P * x + q + G.transpose() * lambda;
    const Eigen::VectorXd r_p = G * x + s - h;

    // Predictor (affine scaling) step.
    Eigen::VectorXd rhs = -r_d + G.transpose() * (lambda - d.cwiseProduct(r_p));
    Eigen::VectorXd dx = ldlt.solve(K, rhs);
    if (!dx.allFinite()) break;
    Eigen::VectorXd ds = -r_p - G * dx;
    Eigen::VectorXd dl = -lambda - d.cwiseProduct(ds);

    const double a_p_aff = max_step(s, ds);
    const double a_d_aff = max_step(lambda, dl);
    const double mu_aff = (s + a_p_aff * ds).dot(lambda + a_d_aff * dl) /
                          static_cast<double>(m);
    const double ratio = std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0);
    const double sigma = ratio * ratio * ratio;

    // Corrector step re-using the factorisation.
    Eigen::VectorXd r_c(m);
    for (Eigen::Index i = 0; i < m; ++i)
      r_c(i) = s(i) * lambda(i) + ds(i) * dl(i) - sigma * mu;
    rhs = -r_d + G.transpose() * (r_c.cwiseQuotient(s) - d.cwiseProduct(r_p));
    dx = ldlt.solve(K, rhs);
    if (!dx.allFinite()) break;
    ds = -r_p - G * dx;
    dl = -r_c.cwiseQuotient(s) - d.cwiseProduct(ds);

    const double eta = 0.995;
    const double a_p = std::min(1.0, eta * max_step(s, ds));
    const double a_d = std::min(1.0, eta * max_step(lambda, dl));
    x += a_p * dx;
    s += a_p * ds;
    lambda += a_d * dl;
    for (Eigen::Index i = 0; i < m; ++i) {
      s(i) = std::max(s(i), 1e-300);
      lambda(i) = std::max(lambda(i), 1e-300);
    }
  }

  // Prefer the current iterate when it certifies; fall back to the best one.
  const Residuals final_res = measure(P, q, G, h, x, lambda);
  const double final_metric = std::max({final_res.primal / settings.tol_feas,
                                        final_res.stationarity / settings.tol_stat,
                                        final_res.complementarity / settings.tol_comp});
  Residuals res = final_res;
  Eigen::VectorXd out_x = x, out_lambda = lambda;
  if (best_metric < final_metric) {
    res = best_res;
    out_x = best_x;
    out_lambda = best_lambda;
  }

  const bool certified = res.primal <= settings.tol_feas &&
                         res.stationarity <= settings.tol_stat &&
                         res.complementarity <= settings.tol_comp;
  if (!infeasible && !certified) {
    const PolishResult polished =
        working_set_polish(P, q, G, h, out_x, out_lambda, settings);
    if (polished.certified) {
      out_x = polished.x;
      out_lambda = polished.lambda;
      res = polished.res;
    }
  }

  QpSolution sol;
  sol.x = out_x;
  sol.multipliers = out_lambda;
  sol.objective = 0.5 * out_x.dot(P * out_x) + q.dot(out_x);
  sol.primal_residual = res.primal;
  sol.stationarity_residual = res.stationarity;
  sol.complementarity_residual = res.complementarity;
  sol.iterations = iter;
  if (infeasible) {
    sol.status = QpStatus::Infeasible;
  } else if (res.primal <= settings.tol_feas &&
             res.stationarity <= settings.tol_stat &&
             res.complementarity <= settings.tol_comp) {
    sol.status = QpStatus::Optimal;
  } else {
    sol.status = QpStatus::MaxIterations;
  }
  return sol;
}

}  // namespace

const char* qp_status_name(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::MaxIterations: return "max-iterations";
    case QpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings) {
  validate(problem, settings);

  Eigen::MatrixXd P = 0.5 * (problem.P + problem.P.transpose());
  if (settings.ridge > 0.0) P.diagonal().array() += settings.ridge;
  const Eigen::VectorXd& q = problem.q;
  const Eigen::MatrixXd& G = problem.G;
  const Eigen::VectorXd& h = problem.h;

  if (G.rows() == 0) return solve_unconstrained(P, q, settings);

  QpSolution sol = solve_inequality(P, q, G, h, settings);
  if (sol.status != QpStatus::MaxIterations) return sol;

  // Proximal rescue: when the direct solve stalls short of the certificate,
  // re-solve a strictly convex recentred copy of the problem. Fixed points
  // of the recentred map are exactly the original solutions, the added
  // curvature removes the degeneracy that caused the stall, and every
  // candidate is measured against the original data before it is believed.
  const double delta =
      1e-7 * std::max(1.0, P.diagonal().cwiseAbs().maxCoeff());
  Eigen::MatrixXd pd = P;
  pd.diagonal().array() += delta;
  Eigen::VectorXd centre = sol.x;
  int iterations = sol.iterations;
  double best_metric =
      std::max({sol.primal_residual / settings.tol_feas,
                sol.stationarity_residual / settings.tol_stat,
                sol.complementarity_residual / settings.tol_comp});

  for (int outer = 0; outer < 8; ++outer) {
    const QpSolution inner =
        solve_inequality(pd, q - delta * centre, G, h, settings);
    iterations += inner.iterations;
    if (!inner.x.allFinite()) break;
    if (inner.status == QpStatus::Infeasible) {
      sol = inner;
      sol.iterations = iterations;
      return sol;
    }

    Residuals res = measure(P, q, G, h, inner.x, inner.multipliers);
    Eigen::VectorXd cand_x = inner.x, cand_lambda = inner.multipliers;
    bool certified = res.primal <= settings.tol_feas &&
                     res.stationarity <= settings.tol_stat &&
                     res.complementarity <= settings.tol_comp;
    if (!certified) {
      const PolishResult polished =
          working_set_polish(P, q, G, h, inner.x, inner.multipliers, settings);
      if (polished.certified) {
        cand_x = polished.x;
        cand_lambda = polished.lambda;
        res = polished.res;
        certified = true;
      }
    }

    const double metric = std::max({res.primal / settings.tol_feas,
                                    res.stationarity / settings.tol_stat,
                                    res.complementarity / settings.tol_comp});
    if (metric < best_metric) {
      best_metric = metric;
      sol.x = cand_x;
      sol.multipliers = cand_lambda;
      sol.objective = 0.5 * cand_x.dot(P * cand_x) + q.dot(cand_x);
      sol.primal_residual = res.primal;
      sol.stationarity_residual = res.stationarity;
      sol.complementarity_residual = res.complementarity;
      sol.status = certified ? QpStatus::Optimal : QpStatus::MaxIterations;
    }
    if (certified) break;
    centre = inner.x;
  }
  sol.iterations = iterations;
  return sol;
}

}  // namespace pingtsvm
