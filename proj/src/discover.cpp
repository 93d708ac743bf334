#include "qforge/discover.hpp"
#include "qforge/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qf {

// ------------------------------------------------------------- optimizers

OptimizeResult minimize_random_search(const ObjectiveFn& fn, const Eigen::VectorXd& lo,
                                      const Eigen::VectorXd& hi, int max_evals, RngHandle& rng) {
    if (max_evals < 1) throw std::invalid_argument("minimize_random_search: max_evals must be >= 1");
    OptimizeResult res;
    res.fx = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(lo.size());
    Eigen::VectorXd x(n);
    for (int e = 0; e < max_evals; ++e) {
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(lo(i), hi(i));
        const double f = fn(x);
        res.trajectory.emplace_back(e, f);
        if (f < res.fx) {
            res.fx = f;
            res.x = x;
        }
    }
    res.evals = max_evals;
    res.converged = true;
    return res;
}

OptimizeResult minimize_trust_region(const ObjectiveFn& fn, const Eigen::VectorXd& x0,
                                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                     const TrustRegionOptions& opts) {
    const int n = static_cast<int>(x0.size());
    if (n < 1) throw std::invalid_argument("minimize_trust_region: empty parameter vector");

    OptimizeResult res;
    res.evals = 0;

    auto clip = [&](Eigen::VectorXd v) {
        for (int i = 0; i < n; ++i) v(i) = std::min(std::max(v(i), lo(i)), hi(i));
        return v;
    };
    auto eval = [&](const Eigen::VectorXd& v) {
        const double f = fn(v);
        res.trajectory.emplace_back(res.evals, f);
        ++res.evals;
        return f;
    };

    double radius = opts.initial_radius * (hi - lo).minCoeff();
    if (!(radius > 0)) radius = opts.initial_radius;

    Eigen::VectorXd x = clip(x0);
    double fx = eval(x);
    res.x = x;
    res.fx = fx;

    // simplex of sample points around x used to fit the linear model
    Eigen::MatrixXd pts(n, n + 1);
    Eigen::VectorXd fvals(n + 1);

    auto refresh_samples = [&]() {
        pts.col(0) = x;
        fvals(0) = fx;
        for (int i = 0; i < n && res.evals < opts.max_evals; ++i) {
            Eigen::VectorXd p = x;
            p(i) += (x(i) + radius <= hi(i)) ? radius : -radius;
            p = clip(p);
            pts.col(i + 1) = p;
            fvals(i + 1) = eval(p);
        }
    };
    refresh_samples();

    while (res.evals < opts.max_evals && radius > opts.radius_tol) {
        // linear model f(x + d) ~ fx + g.d from the sample set
        Eigen::MatrixXd a(n + 1, n);
        Eigen::VectorXd b(n + 1);
        for (int i = 0; i <= n; ++i) {
            a.row(i) = (pts.col(i) - x).transpose();
            b(i) = fvals(i) - fx;
        }
        const Eigen::VectorXd g = a.colPivHouseholderQr().solve(b);
        const double gnorm = g.norm();
        if (!(gnorm > 1e-300)) {
            radius *= 0.5;
            refresh_samples();
            continue;
        }
        const Eigen::VectorXd cand = clip(x - (radius / gnorm) * g);
        const double predicted = gnorm * radius;
        const double fc = eval(cand);
        if (fc < fx) {
            // shift the sample set toward the new center, keep the best points
            int replace = 0;
            for (int i = 1; i <= n; ++i) {
                if (fvals(i) > fvals(replace)) replace = i;
            }
            pts.col(replace) = x;
            fvals(replace) = fx;
            x = cand;
            fx = fc;
            pts.col(0) = x;
            fvals(0) = fx;
            if (fx < res.fx) {
                res.fx = fx;
                res.x = x;
            }
            if ((fvals.maxCoeff() - fc) > 0.7 * predicted) radius *= 1.5;
        } else {
            radius *= 0.5;
            refresh_samples();
        }
    }
    res.converged = radius <= opts.radius_tol;
    if (res.fx > fx) {
        res.fx = fx;
        res.x = x;
    }
    return res;
}

// ------------------------------------------------------------- discovery

double discovery_objective(const Eigen::VectorXd& params, const GateSetTemplate& ansatz,
                           const EvaluationReport& gs1_report, const Dataset& ds,
                           const CostWeights& weights, const EvalConfig& cfg) {
    Eigen::VectorXd clipped = params;
    for (int i = 0; i < clipped.size(); ++i) {
        clipped(i) = std::min(std::max(clipped(i), ansatz.lo(i)), ansatz.hi(i));
    }
    try {
        const GateSet gs2 = instantiate_template(ansatz, clipped);
        const EvaluationReport r2 = evaluate_gateset(gs2, ds, cfg);
        const ComparisonReport cr = cost(gs1_report, r2, weights, gs2.fab_costs);
        return cr.total_cost;
    } catch (const std::exception&) {
        return -std::numeric_limits<double>::infinity();
    }
}

GateSetTemplate make_template(const std::vector<GateSpec>& specs, std::uint64_t freeze_seed,
                              const std::string& label) {
    GateSetTemplate t;
    t.specs = specs;
    t.freeze_seed = freeze_seed;
    t.label = label;
    int total = 0;
    for (const auto& s : specs) total += s.param_count;
    t.lo.resize(total);
    t.hi.resize(total);
    int off = 0;
    for (const auto& s : specs) {
        const ParamBounds b = param_bounds(s);
        for (int i = 0; i < s.param_count; ++i) {
            t.lo(off) = b.lo[i];
            t.hi(off) = b.hi[i];
            ++off;
        }
    }
    return t;
}

GateSet instantiate_template(const GateSetTemplate& t, const Eigen::VectorXd& params) {
    std::vector<double> p(params.data(), params.data() + params.size());
    RngHandle rng(t.freeze_seed);
    return assemble_gateset(t.specs, p, rng, false, t.label);
}

DiscoveryReport discover_gateset(const std::vector<GateSpec>& ansatz, const GateSet& gs1,
                                 const Dataset& ds, const CostWeights& weights,
                                 const EvalConfig& eval_cfg, const SearchConfig& search_cfg) {
    GateSetTemplate tmpl = make_template(ansatz, search_cfg.seed, "gs2");
    const int nparams = static_cast<int>(tmpl.lo.size());
    if (nparams == 0 && search_cfg.method == SearchMethod::DerivativeFreeLocal) {
        throw std::invalid_argument(
            "discover_gateset: ansatz has no parameters; use compare mode instead");
    }

    // GS1 is evaluated exactly once and cached; candidate GS2 evaluations reuse
    // the same per-point seeds so the optimizer sees a deterministic landscape.
    const EvaluationReport r1 = evaluate_gateset(gs1, ds, eval_cfg);

    const ObjectiveFn neg_score = [&](const Eigen::VectorXd& p) {
        return -discovery_objective(p, tmpl, r1, ds, weights, eval_cfg);
    };

    RngHandle rng(search_cfg.seed);
    OptimizeResult best;
    best.fx = std::numeric_limits<double>::infinity();
    const int restarts = std::max(search_cfg.restarts, 1);
    for (int restart = 0; restart < restarts; ++restart) {
        OptimizeResult r;
        if (search_cfg.method == SearchMethod::RandomSearch) {
            r = minimize_random_search(neg_score, tmpl.lo, tmpl.hi, search_cfg.max_evals, rng);
        } else {
            Eigen::VectorXd x0(nparams);
            if (restart == 0 && search_cfg.initial_point.size() == nparams) {
                x0 = search_cfg.initial_point;
            } else {
                for (int i = 0; i < nparams; ++i) x0(i) = rng.uniform(tmpl.lo(i), tmpl.hi(i));
            }
            TrustRegionOptions topt;
            topt.max_evals = search_cfg.max_evals;
            r = minimize_trust_region(neg_score, x0, tmpl.lo, tmpl.hi, topt);
        }
        if (r.fx < best.fx) {
            const int offset = restart * search_cfg.max_evals;
            best = r;
            for (auto& [idx, val] : best.trajectory) idx += offset;
        }
    }

    DiscoveryReport rep;
    rep.best_params = best.x;
    rep.best_score = -best.fx;
    for (const auto& [idx, val] : best.trajectory) rep.trajectory.emplace_back(idx, -val);
    rep.best_gateset = instantiate_template(tmpl, best.x);
    const EvaluationReport r2 = evaluate_gateset(rep.best_gateset, ds, eval_cfg);
    rep.final_comparison = cost(r1, r2, weights, rep.best_gateset.fab_costs);
    return rep;
}

}  // namespace qf
