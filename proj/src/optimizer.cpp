// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace capa {

Utility sum_rate_utility() {
  return [](const Eigen::VectorXd& theta) {
    double u = 0.0;
    for (Eigen::Index k = 0; k < theta.size(); ++k)
      u += std::log2(1.0 + theta(k));
    return u;
  };
}

LambdaVector fixed_point_lambda(const CorrelationMatrix& Q, double noise_power,
                                const Eigen::VectorXd& targets,
                                const OptimizerOptions& opt,
                                const LambdaVector* warm_start) {
  const int K = Q.num_users();
  if (targets.size() != K)
    throw std::invalid_argument("fixed_point_lambda: target size mismatch");
  if (targets.minCoeff() <= 0.0)
    throw std::invalid_argument("fixed_point_lambda: targets must be positive");
  if (!(noise_power > 0.0))
    throw std::invalid_argument("fixed_point_lambda: noise power must be positive");

  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(K, K);
  Eigen::VectorXd qdiag = Q.Q.diagonal().real();

  LambdaVector lambda(K);
  if (warm_start && warm_start->size() == K && warm_start->minCoeff() > 0.0) {
    lambda = *warm_start;
  } else {
    for (int k = 0; k < K; ++k)
      lambda(k) = noise_power * targets(k) / qdiag(k);
  }

  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opt.fixed_point_max_iter; ++iter) {
    const Eigen::MatrixXcd sys =
        I + (lambda.cast<cxd>().asDiagonal() * Q.Q) / noise_power;
    const Eigen::MatrixXcd T = Q.Q * sys.partialPivLu().solve(I);
    residual = 0.0;
    for (int k = 0; k < K; ++k) {
      const double denom = (1.0 + 1.0 / targets(k)) * std::real(T(k, k));
      const double next = noise_power / denom;
      residual = std::max(residual,
                          std::abs(next - lambda(k)) /
                              std::max(lambda(k), 1e-300));
      lambda(k) = next;
    }
    if (residual < opt.fixed_point_tol) return lambda;
  }
  throw std::runtime_error(
      "fixed_point_lambda: no convergence after " +
      std::to_string(opt.fixed_point_max_iter) +
      " sweeps (last residual " + std::to_string(residual) + ")");
}

PowerSolution min_power_for_targets(const CorrelationMatrix& Q,
                                    double noise_power,
                                    const Eigen::VectorXd& targets,
                                    const OptimizerOptions& opt,
                                    const LambdaVector* warm_start) {
  const int K = Q.num_users();
  PowerSolution sol;
  sol.lambda = fixed_point_lambda(Q, noise_power, targets, opt, warm_start);
  sol.min_power = sol.lambda.sum();

  // Structured directions; the per-user column scales are pinned down by
  // the binding SINR constraints, which are linear in the powers p.
  const Eigen::MatrixXcd Phi =
      (Eigen::MatrixXcd::Identity(K, K) +
       (sol.lambda.cast<cxd>().asDiagonal() * Q.Q) / noise_power)
          .partialPivLu()
          .solve(Eigen::MatrixXcd::Identity(K, K));
  const Eigen::MatrixXcd M = Q.Q * Phi;

  Eigen::MatrixXd B(K, K);
  Eigen::VectorXd rhs(K);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < K; ++i)
      B(k, i) = i == k ? std::norm(M(k, k))
                       : -targets(k) * std::norm(M(k, i));
    rhs(k) = targets(k) * noise_power;
  }
  Eigen::VectorXd p = B.partialPivLu().solve(rhs);
  for (int k = 0; k < K; ++k) {
    if (p(k) < -1e-9 * p.cwiseAbs().maxCoeff())
      throw std::runtime_error(
          "min_power_for_targets: negative recovered power, targets "
          "infeasible for the structured beamformer");
    p(k) = std::max(p(k), 0.0);
  }

  Eigen::MatrixXcd A = Phi;
  for (int k = 0; k < K; ++k) A.col(k) *= std::sqrt(p(k));
  sol.A = BeamCoefficients{std::move(A)};
  return sol;
}

Eigen::VectorXd initial_box(const CorrelationMatrix& Q, double power_budget,
                            double noise_power) {
  if (!(power_budget > 0.0) || !(noise_power > 0.0))
    throw std::invalid_argument("initial_box: powers must be positive");
  return power_budget * Q.Q.diagonal().real() / noise_power;
}

namespace {

// Multiplier sum for scaled targets alpha*z on the active user set;
// warm-started across evaluations within one projection.
struct FeasibilityOracle {
  const CorrelationMatrix& Q;
  double noise_power;
  const Eigen::VectorXd& z;
  const OptimizerOptions& opt;
  LambdaVector warm;

  double power_at(double alpha) {
    LambdaVector lam = fixed_point_lambda(Q, noise_power, alpha * z, opt,
                                          warm.size() ? &warm : nullptr);
    warm = lam;
    return lam.sum();
  }
};

}  // namespace

ProjectionResult project_onto_feasible(const CorrelationMatrix& Q,
                                       double noise_power,
                                       double power_budget,
                                       const Eigen::VectorXd& z,
                                       const OptimizerOptions& opt,
                                       ProjectionWarmStart* warm) {
  const int K = Q.num_users();
  if (z.size() != K)
    throw std::invalid_argument("project_onto_feasible: size mismatch");
  if (z.maxCoeff() <= 0.0)
    throw std::invalid_argument("project_onto_feasible: all-zero vertex");

  // Exclude zero-target users from the multiplier system (their beam is
  // zero); re-insert silent users afterwards.
  std::vector<int> active;
  for (int k = 0; k < K; ++k)
    if (z(k) > 0.0) active.push_back(k);
  const int Ka = static_cast<int>(active.size());

  Eigen::MatrixXcd Qa(Ka, Ka);
  Eigen::VectorXd za(Ka);
  for (int a = 0; a < Ka; ++a) {
    za(a) = z(active[static_cast<std::size_t>(a)]);
    for (int b = 0; b < Ka; ++b)
      Qa(a, b) = Q.Q(active[static_cast<std::size_t>(a)],
                     active[static_cast<std::size_t>(b)]);
  }
  const CorrelationMatrix Qsub{std::move(Qa)};

  FeasibilityOracle oracle{Qsub, noise_power, za, opt, {}};
  if (warm && warm->lambda.size() == Ka && warm->lambda.minCoeff() > 0.0)
    oracle.warm = warm->lambda;

  const double gtol =
      std::max(1e-12, 10.0 * opt.fixed_point_tol) * power_budget;
  double alpha = 1.0;
  bool solved = false;

  // A neighboring ray's boundary scale starts a secant directly, skipping
  // the cold bracket; the bisection below remains the fallback.
  if (warm && warm->alpha > 0.0 && warm->alpha <= 1.0) {
    double a1 = std::min(warm->alpha, 1.0);
    double a0 = std::max(0.98 * a1, 1e-8);
    double g0 = oracle.power_at(a0) - power_budget;
    double g1 = oracle.power_at(a1) - power_budget;
    double best_a = std::abs(g0) < std::abs(g1) ? a0 : a1;
    double best_g = std::min(std::abs(g0), std::abs(g1));
    for (int it = 0; it < 12 && std::abs(g1 - g0) > 0.0; ++it) {
      double an = a1 - g1 * (a1 - a0) / (g1 - g0);
      if (!(an > 0.0)) an = 0.5 * std::min(a0, a1);
      an = std::min(an, 1.0);
      const double gn = oracle.power_at(an) - power_budget;
      a0 = a1;
      g0 = g1;
      a1 = an;
      g1 = gn;
      if (std::abs(gn) < best_g) {
        best_g = std::abs(gn);
        best_a = an;
      }
      if (an == 1.0 && gn <= 0.0) {
        alpha = 1.0;
        solved = true;
        break;
      }
      if (std::abs(gn) <= gtol) {
        alpha = best_a;
        solved = true;
        break;
      }
    }
  }

  double p_hi = solved ? 0.0 : oracle.power_at(1.0);
  if (!solved && p_hi > power_budget) {
    double lo = 0.0, hi = 1.0;
    double p_lo = 0.0;  // P*(alpha) -> 0 as alpha -> 0
    while (hi - lo > opt.epsilon_bisect) {
      const double mid = 0.5 * (lo + hi);
      const double pm = oracle.power_at(mid);
      if (pm <= power_budget) {
        lo = mid;
        p_lo = pm;
      } else {
        hi = mid;
        p_hi = pm;
      }
    }
    // Secant polish on sum(lambda) - P; pins the full-power equality well
    // below the bisection granularity.
    double a0 = lo, g0 = p_lo - power_budget;
    double a1 = hi, g1 = p_hi - power_budget;
    // The multiplier solve leaves O(fixed_point_tol) noise on the power,
    // so the polish cannot resolve below gtol; keep the best iterate seen.
    alpha = lo;
    double best_g = std::abs(g0);
    for (int it = 0; it < 40 && std::abs(g1 - g0) > 0.0; ++it) {
      double an = a1 - g1 * (a1 - a0) / (g1 - g0);
      an = std::clamp(an, 0.0, 1.0);
      const double gn = oracle.power_at(an) - power_budget;
      a0 = a1;
      g0 = g1;
      a1 = an;
      g1 = gn;
      if (std::abs(gn) < best_g) {
        best_g = std::abs(gn);
        alpha = an;
      }
      if (std::abs(gn) <= gtol) break;
    }
  }

  PowerSolution sub = min_power_for_targets(
      Qsub, noise_power, alpha * za, opt,
      oracle.warm.size() ? &oracle.warm : nullptr);
  if (warm) {
    warm->lambda = sub.lambda;
    warm->alpha = alpha;
  }

  ProjectionResult res;
  res.alpha = alpha;
  res.lambda = LambdaVector::Zero(K);
  res.min_power = sub.min_power;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(K, K);
  for (int a = 0; a < Ka; ++a)
    for (int b = 0; b < Ka; ++b)
      A(active[static_cast<std::size_t>(a)],
        active[static_cast<std::size_t>(b)]) = sub.A.A(a, b);
  for (int a = 0; a < Ka; ++a)
    res.lambda(active[static_cast<std::size_t>(a)]) = sub.lambda(a);
  res.A = BeamCoefficients{std::move(A)};
  return res;
}

namespace {

struct Vertex {
  Eigen::VectorXd z;
  Eigen::VectorXd floor;  // incumbent-implied coordinate lower bounds
  double u = 0.0;
};

bool dominated(const Eigen::VectorXd& z, const Eigen::VectorXd& by) {
  for (Eigen::Index k = 0; k < z.size(); ++k)
    if (z(k) > by(k)) return false;
  return true;
}

// Upper bound on the utility over {floor <= theta <= z, sum cost*theta <= P}.
// Capped water-filling: theta_k(mu) = clamp(mu/cost_k - 1, floor_k, z_k) is
// the relaxed argmax for the sum-rate utility; the bound is evaluated at the
// upper bisection bracket so roundoff never undercuts the true maximum.
double relaxed_vertex_bound(const Eigen::VectorXd& z,
                            const Eigen::VectorXd& floor,
                            const Eigen::VectorXd& cost, double power_budget,
                            const Utility& utility) {
  double full = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) full += cost(k) * z(k);
  if (full <= power_budget) return utility(z);

  const auto theta_at = [&](double mu) {
    Eigen::VectorXd theta(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k)
      theta(k) = std::clamp(mu / cost(k) - 1.0, floor(k), z(k));
    return theta;
  };
  const auto spend = [&](const Eigen::VectorXd& theta) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < z.size(); ++k) s += cost(k) * theta(k);
    return s;
  };

  double lo = 0.0;
  double hi = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k)
    hi = std::max(hi, cost(k) * (1.0 + z(k)));
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spend(theta_at(mid)) < power_budget)
      lo = mid;
    else
      hi = mid;
  }
  return utility(theta_at(hi));
}

// Branch-reduce step for the sum-rate utility. Points below the incumbent
// can never improve the answer, which forces every coordinate above the
// level floor_k = 2^(u_min - sum_{j != k} log2(1+z_j)) - 1; combining the
// floors with the interference-free power cut sum cost*theta <= P clips the
// box from above. Returns false when the reduced box cannot contain a point
// beating the incumbent (the vertex may be discarded).
bool reduce_vertex(Eigen::VectorXd& z, Eigen::VectorXd& floor,
                   const Eigen::VectorXd& cost, double power_budget,
                   double u_min) {
  const Eigen::Index K = z.size();
  floor = Eigen::VectorXd::Zero(K);
  if (!std::isfinite(u_min)) return true;
  for (int pass = 0; pass < 2; ++pass) {
    double logs = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) logs += std::log2(1.0 + z(j));
    for (Eigen::Index k = 0; k < K; ++k) {
      const double need = u_min - (logs - std::log2(1.0 + z(k)));
      floor(k) = std::max(0.0, std::exp2(need) - 1.0);
      if (floor(k) > z(k)) return false;
    }
    double committed = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) committed += cost(j) * floor(j);
    if (committed > power_budget) return false;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double cap =
          (power_budget - (committed - cost(k) * floor(k))) / cost(k);
      z(k) = std::min(z(k), cap);
      if (z(k) < floor(k)) return false;
    }
  }
  return true;
}

}  // namespace

PolyblockResult polyblock_maximize(const CorrelationMatrix& Q,
                                   double noise_power, double power_budget,
                                   const Utility& utility,
                                   const OptimizerOptions& opt) {
  const int K = Q.num_users();
  const Eigen::VectorXd box = initial_box(Q, power_budget, noise_power);
  const Eigen::VectorXd z_floor = 1e-9 * box;
  const Eigen::VectorXd cost =
      noise_power * Q.Q.diagonal().real().cwiseInverse();

  std::vector<Vertex> vertices;
  {
    Vertex root{box, Eigen::VectorXd::Zero(K), 0.0};
    root.u = opt.power_relaxed_bound
                 ? relaxed_vertex_bound(root.z, root.floor, cost,
                                        power_budget, utility)
                 : utility(root.z);
    vertices.push_back(std::move(root));
  }

  PolyblockResult res;
  res.theta = Eigen::VectorXd::Zero(K);
  double u_min = -std::numeric_limits<double>::infinity();
  double u_max = std::numeric_limits<double>::infinity();

  const auto t_start = std::chrono::steady_clock::now();

  int n = 0;
  while (n < opt.max_iter && !vertices.empty()) {
    ++n;
    // Lowest index wins ties for reproducible traces.
    std::size_t best = 0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
      if (vertices[i].u > vertices[best].u) best = i;
    const Vertex zn = vertices[best];
    // Reduction can leave every surviving box without an improving point;
    // the incumbent itself then carries the bound.
    u_max = std::max(zn.u, u_min);

    const ProjectionResult proj =
        project_onto_feasible(Q, noise_power, power_budget, zn.z, opt);
    const Eigen::VectorXd theta = proj.alpha * zn.z;
    const double u_proj = utility(theta);
    if (u_proj > u_min) {
      u_min = u_proj;
      res.theta = theta;
    }

    vertices.erase(vertices.begin() + static_cast<std::ptrdiff_t>(best));

    // Children z - [z - pi(z)]_k e_k; drop near-zero, reduced-away, and
    // dominated ones.
    std::vector<Vertex> children;
    for (int k = 0; k < K; ++k) {
      Vertex child;
      child.z = zn.z;
      child.z(k) = theta(k);
      if (child.z(k) <= z_floor(k)) continue;
      if (opt.power_relaxed_bound) {
        if (!reduce_vertex(child.z, child.floor, cost, power_budget, u_min))
          continue;
        child.u = relaxed_vertex_bound(child.z, child.floor, cost,
                                       power_budget, utility);
      } else {
        child.floor = Eigen::VectorXd::Zero(K);
        child.u = utility(child.z);
      }
      children.push_back(std::move(child));
    }
    for (std::size_t c = 0; c < children.size(); ++c) {
      bool keep = true;
      for (const auto& v : vertices)
        if (dominated(children[c].z, v.z)) {
          keep = false;
          break;
        }
      for (std::size_t d = 0; keep && d < children.size(); ++d)
        if (d != c && dominated(children[c].z, children[d].z) &&
            !dominated(children[d].z, children[c].z)) {
          keep = false;
        }
      if (keep) vertices.push_back(children[c]);
    }

    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t_start)
            .count();
    res.trace.push_back(
        {n, u_max, u_min, static_cast<int>(vertices.size()), wall_ms});

    if (u_max - u_min <= opt.epsilon_gap) {
      res.converged = true;
      break;
    }
  }

  if (!res.converged && vertices.empty() && std::isfinite(u_min)) {
    // Every remaining box was pruned: the incumbent is optimal.
    u_max = u_min;
    res.converged = true;
  }
  res.iterations = n;
  res.upper_bound = u_max;
  res.utility = u_min;
  // Recover the beamformer at the incumbent via the power-minimization
  // route; targets are strictly positive by vertex hygiene.
  res.A = min_power_for_targets(Q, noise_power, res.theta, opt).A;
  return res;
}

}  // namespace capa
