// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_OPTIMIZER_HPP
#define CAPA_OPTIMIZER_HPP

#include <functional>
#include <optional>
#include <vector>

#include "capa/beamformers.hpp"

namespace capa {

/// Utility over a vector of SINR targets. Must be strictly increasing in
/// every argument for the outer-approximation algorithm to be valid.
using Utility = std::function<double(const Eigen::VectorXd&)>;

/// Sum-rate utility sum_k log2(1 + theta_k).
Utility sum_rate_utility();

struct OptimizerOptions {
  double epsilon_gap = 1e-2;        // utility units
  double epsilon_bisect = 1e-6;     // on the ray scale alpha
  double fixed_point_tol = 1e-10;   // relative residual on lambda
  int fixed_point_max_iter = 10000;
  int max_iter = 5000;              // outer iterations

  // Tighten the per-vertex utility bound by the interference-free power
  // relaxation: any point theta <= z that is achievable under the budget
  // also satisfies sum_k theta_k * sigma^2 / q_kk <= P, so the capped
  // water-filling maximum over that simplex bounds the utility inside the
  // box [0, z]. Valid for the sum-rate utility; disable for custom
  // utilities whose relaxed maximum is not waterfilling-shaped.
  bool power_relaxed_bound = true;
};

/// Solution of the power-minimization problem for a set of SINR targets.
struct PowerSolution {
  LambdaVector lambda;   // optimal multipliers, sum = minimized power
  double min_power = 0;  // A^2
  BeamCoefficients A;    // beamformer meeting every target with equality
};

/// Projection of a vertex onto the boundary of the achievable SINR region.
struct ProjectionResult {
  double alpha = 0.0;    // in (0, 1]
  LambdaVector lambda;
  double min_power = 0;  // = sum(lambda) at the boundary
  BeamCoefficients A;
};

struct TraceRow {
  int iteration = 0;
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  int vertex_count = 0;
  double wall_ms = 0.0;
};

struct PolyblockResult {
  Eigen::VectorXd theta;     // incumbent SINR point
  BeamCoefficients A;        // beamformer recovered at theta
  double utility = 0.0;      // U(theta)
  double upper_bound = 0.0;  // final U_max
  bool converged = false;
  int iterations = 0;
  std::vector<TraceRow> trace;
};

/// Fixed-point iteration for the Lagrange multipliers of the
/// power-minimization problem at the given SINR targets:
///   lambda_k = sigma^2 / ((1 + 1/t_k) [Q (I + Lambda Q / sigma^2)^{-1}]_{kk}).
/// Starts from lambda_k = sigma^2 t_k / q_kk and sweeps until the relative
/// residual drops below tol. Throws std::runtime_error (carrying the last
/// residual) on non-convergence.
LambdaVector fixed_point_lambda(const CorrelationMatrix& Q, double noise_power,
                                const Eigen::VectorXd& targets,
                                const OptimizerOptions& opt = {},
                                const LambdaVector* warm_start = nullptr);

/// Minimum transmit power that meets all SINR targets with equality, plus
/// the beamformer achieving it. Strong duality: min power = sum(lambda).
PowerSolution min_power_for_targets(const CorrelationMatrix& Q,
                                    double noise_power,
                                    const Eigen::VectorXd& targets,
                                    const OptimizerOptions& opt = {},
                                    const LambdaVector* warm_start = nullptr);

/// Bisection for the boundary scale alpha of the ray through z (Algorithm
/// 2 bracket [0, 1]; valid because vertices never leave the initial box).
/// Zero-target coordinates are excluded from the multiplier system and
/// re-inserted as silent users. A secant polish after the bisection pins
/// sum(lambda) to the power budget.
/// Carry-over state when projecting many nearby rays in sequence: the
/// previous boundary multipliers seed the fixed point and the previous
/// boundary scale seeds a secant that usually replaces the bisection.
struct ProjectionWarmStart {
  LambdaVector lambda;
  double alpha = 0.0;
};

ProjectionResult project_onto_feasible(const CorrelationMatrix& Q,
                                       double noise_power,
                                       double power_budget,
                                       const Eigen::VectorXd& z,
                                       const OptimizerOptions& opt = {},
                                       ProjectionWarmStart* warm = nullptr);

/// Single-user SINR upper bounds b_k = P q_kk / sigma^2; the box [0, b]
/// encloses the achievable region.
Eigen::VectorXd initial_box(const CorrelationMatrix& Q, double power_budget,
                            double noise_power);

/// Polyblock outer approximation over the SINR region. Deterministic:
/// vertex ties break toward the lowest index, dominated and near-zero
/// vertices are pruned every iteration.
PolyblockResult polyblock_maximize(const CorrelationMatrix& Q,
                                   double noise_power, double power_budget,
                                   const Utility& utility,
                                   const OptimizerOptions& opt = {});

}  // namespace capa

#endif  // CAPA_OPTIMIZER_HPP
