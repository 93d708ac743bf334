#include "qforge/discover.hpp"
#include "qforge/optimize.hpp"

#include <doctest.h>

#include <cmath>

using namespace qf;

TEST_CASE("random search on the negative sphere") {
    // toy oracle: min ||x||^2 over [-2, 2]^3, optimum 0 at the origin
    const ObjectiveFn sphere = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -2.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 2.0);
    RngHandle rng(1);
    const OptimizeResult r = minimize_random_search(sphere, lo, hi, 1000, rng);
    CHECK(r.fx < 0.1);
    CHECK(r.trajectory.size() == 1000);
    // running max of the score (= -fx) is monotone along the trajectory
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [idx, val] : r.trajectory) {
        best = std::min(best, val);
    }
    CHECK(best == doctest::Approx(r.fx));

    RngHandle one(2);
    const OptimizeResult single = minimize_random_search(sphere, lo, hi, 1, one);
    CHECK(single.trajectory.size() == 1);
    CHECK(single.fx == single.trajectory[0].second);
}

TEST_CASE("trust region converges on smooth toys") {
    const ObjectiveFn sphere = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -5.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 5.0);
    RngHandle rng(3);
    Eigen::VectorXd x0(3);
    for (int i = 0; i < 3; ++i) x0(i) = rng.uniform(-5, 5);
    TrustRegionOptions opts;
    opts.max_evals = 2000;
    const OptimizeResult r = minimize_trust_region(sphere, x0, lo, hi, opts);
    CHECK(r.fx < 1e-4);

    // shifted quadratic with bounds that clip one coordinate
    const ObjectiveFn shifted = [](const Eigen::VectorXd& x) {
        return (x(0) - 1.0) * (x(0) - 1.0) + (x(1) + 7.0) * (x(1) + 7.0);
    };
    const Eigen::VectorXd lo2 = Eigen::VectorXd::Constant(2, -2.0);
    const Eigen::VectorXd hi2 = Eigen::VectorXd::Constant(2, 2.0);
    Eigen::VectorXd start(2);
    start << 0.0, 0.0;
    const OptimizeResult r2 = minimize_trust_region(shifted, start, lo2, hi2, opts);
    CHECK(r2.x(0) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(r2.x(1) == doctest::Approx(-2.0).epsilon(1e-2));  // pinned at the bound
}

TEST_CASE("objective is a deterministic function of the parameters") {
    RngHandle gsrng(0);
    const GateSet gs1 = assemble_gateset(
        {GateSpec::make(GateId::H1), GateSpec::make(GateId::T1)}, {}, gsrng, false, "HT");
    RngHandle dsrng(5);
    const Dataset ds = gen_haar_unitaries(1, 4, dsrng);
    EvalConfig ec;
    ec.pipeline.basis_depth = 4;
    ec.pipeline.recursion = 1;
    ec.seed = 99;
    const EvaluationReport r1 = evaluate_gateset(gs1, ds, ec);

    const GateSetTemplate tmpl =
        make_template({GateSpec::make(GateId::P1), GateSpec::make(GateId::P1)}, 7, "PP");
    CHECK(tmpl.lo.size() == 6);
    const CostWeights w{50, 1, 1, 1, 0};
    Eigen::VectorXd p(6);
    p << 0.3, 1.1, 4.4, 2.0, 0.2, 3.3;
    const double a = discovery_objective(p, tmpl, r1, ds, w, ec);
    const double b = discovery_objective(p, tmpl, r1, ds, w, ec);
    CHECK(a == b);

    // out-of-bounds parameters evaluate exactly like their clipped projection
    Eigen::VectorXd q = p;
    q(0) = -3.0;
    Eigen::VectorXd qc = q;
    qc(0) = 0.0;
    CHECK(discovery_objective(q, tmpl, r1, ds, w, ec) ==
          discovery_objective(qc, tmpl, r1, ds, w, ec));
}

TEST_CASE("ansatz parameter packing") {
    const GateSetTemplate a =
        make_template({GateSpec::make(GateId::P1), GateSpec::make(GateId::P1)}, 0, "a");
    CHECK(a.lo.size() == 6);
    const GateSetTemplate b = make_template({GateSpec::make(GateId::P1), GateSpec::make(GateId::P1),
                                             GateSpec::make(GateId::NL2)},
                                            0, "b");
    CHECK(b.lo.size() == 9);
    const GateSetTemplate c = make_template({GateSpec::make(GateId::H1), GateSpec::make(GateId::T1),
                                             GateSpec::make(GateId::P1)},
                                            0, "c");
    CHECK(c.lo.size() == 3);
    // frozen members keep their freeze across instantiations
    const GateSetTemplate r =
        make_template({GateSpec::make(GateId::R1), GateSpec::make(GateId::P1)}, 11, "r");
    const GateSet g1 = instantiate_template(r, Eigen::Vector3d(0.1, 0.2, 0.3));
    const GateSet g2 = instantiate_template(r, Eigen::Vector3d(1.1, 1.2, 1.3));
    CHECK((g1.matrices[0] - g2.matrices[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g1.matrices[1] - g2.matrices[1]).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("discover_gateset end to end (tiny budget)") {
    RngHandle gsrng(0);
    const GateSet gs1 = assemble_gateset(
        {GateSpec::make(GateId::H1), GateSpec::make(GateId::T1)}, {}, gsrng, false, "HT");
    RngHandle dsrng(6);
    const Dataset ds = gen_haar_unitaries(1, 3, dsrng);
    EvalConfig ec;
    ec.pipeline.basis_depth = 3;
    ec.pipeline.recursion = 0;
    ec.seed = 5;
    SearchConfig sc;
    sc.method = SearchMethod::RandomSearch;
    sc.max_evals = 30;
    sc.seed = 17;
    const CostWeights w{50, 1, 1, 1, 0};
    const DiscoveryReport rep =
        discover_gateset({GateSpec::make(GateId::P1), GateSpec::make(GateId::P1)}, gs1, ds, w, ec, sc);
    CHECK(rep.trajectory.size() <= 30);
    CHECK(rep.best_params.size() == 6);
    // the reported best score is reproducible from the stored parameters
    const GateSetTemplate tmpl =
        make_template({GateSpec::make(GateId::P1), GateSpec::make(GateId::P1)}, sc.seed, "gs2");
    const EvaluationReport r1 = evaluate_gateset(gs1, ds, ec);
    CHECK(discovery_objective(rep.best_params, tmpl, r1, ds, w, ec) ==
          doctest::Approx(rep.best_score).epsilon(1e-12));
    // trajectory best equals the reported best
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [idx, s] : rep.trajectory) best = std::max(best, s);
    CHECK(best == doctest::Approx(rep.best_score));

    // a parameter-free ansatz cannot drive the local optimizer
    SearchConfig bad = sc;
    bad.method = SearchMethod::DerivativeFreeLocal;
    CHECK_THROWS_AS(
        discover_gateset({GateSpec::make(GateId::H1)}, gs1, ds, w, ec, bad),
        std::invalid_argument);
}
