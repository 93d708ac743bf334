#pragma once

#include "qforge/matcore.hpp"

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace qf {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct OptimizeResult {
    Eigen::VectorXd x;
    double fx = 0.0;
    std::vector<std::pair<int, double>> trajectory;  // (eval index, value)
    int evals = 0;
    bool converged = false;
};

struct TrustRegionOptions {
    int max_evals = 1000;
    double initial_radius = 0.25;  // fraction of the smallest box extent
    double radius_tol = 1e-6;
};

/// Derivative-free minimization with linear-approximation trust-region
/// semantics: a linear model is fit to a simplex of n+1 samples, steps go
/// against the model gradient within the radius, and the radius shrinks on
/// rejected steps. Bounds are enforced by clipping. Terminates when the
/// radius drops below radius_tol or the evaluation budget is spent.
OptimizeResult minimize_trust_region(const ObjectiveFn& fn, const Eigen::VectorXd& x0,
                                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                     const TrustRegionOptions& opts);

/// Uniform sampling within the box; returns the best sample seen.
OptimizeResult minimize_random_search(const ObjectiveFn& fn, const Eigen::VectorXd& lo,
                                      const Eigen::VectorXd& hi, int max_evals, RngHandle& rng);

}  // namespace qf
