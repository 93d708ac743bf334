#include "qforge/gatelib.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace qf;

namespace {

Mat fixed_gate(GateId id) {
    RngHandle rng(0);
    return gate_matrix(GateSpec::make(id), {}, rng);
}

// independent oracle for NL2: product of the three commuting Pauli exponentials
Mat nl2_oracle(double tx, double ty, double tz) {
    Mat x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
    auto expm = [](const Mat& p, double coef) {
        return Mat(std::cos(coef) * Mat::Identity(4, 4) - cplx(0, 1) * std::sin(coef) * p);
    };
    return expm(kron(x, x), M_PI / 2 * tx) * expm(kron(y, y), M_PI / 2 * ty) *
           expm(kron(z, z), M_PI / 2 * tz);
}

}  // namespace

TEST_CASE("catalog matrices are unitary and satisfy the algebra") {
    for (GateId id : {GateId::T1, GateId::TD1, GateId::S1, GateId::Z1, GateId::X1, GateId::H1,
                      GateId::CX2, GateId::CZ2, GateId::B2}) {
        CHECK(is_unitary(fixed_gate(id), 1e-12));
    }
    const Mat t = fixed_gate(GateId::T1), td = fixed_gate(GateId::TD1);
    const Mat s = fixed_gate(GateId::S1), z = fixed_gate(GateId::Z1);
    const Mat x = fixed_gate(GateId::X1), h = fixed_gate(GateId::H1);
    CHECK(((t * td) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((t * t) - s).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((s * s) - z).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((x * x) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((h * h) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("H1 matches the tabulated Hadamard") {
    const Mat h = fixed_gate(GateId::H1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(h(0, 0) - cplx(r, 0)) < 1e-15);
    CHECK(std::abs(h(0, 1) - cplx(r, 0)) < 1e-15);
    CHECK(std::abs(h(1, 0) - cplx(r, 0)) < 1e-15);
    CHECK(std::abs(h(1, 1) - cplx(-r, 0)) < 1e-15);
}

TEST_CASE("B2 entries") {
    const Mat b = fixed_gate(GateId::B2);
    CHECK(std::abs(b(0, 0) - cplx(std::cos(M_PI / 8), 0)) < 1e-15);
    CHECK(std::abs(b(0, 3) - cplx(0, std::sin(M_PI / 8))) < 1e-15);
    CHECK(std::abs(b(1, 1) - cplx(std::cos(3 * M_PI / 8), 0)) < 1e-15);
    CHECK(std::abs(b(1, 2) - cplx(0, std::sin(3 * M_PI / 8))) < 1e-15);
}

TEST_CASE("P1 and NL2 parametric gates") {
    RngHandle rng(0);
    const std::vector<double> zero3 = {0, 0, 0};
    CHECK((gate_matrix(GateSpec::make(GateId::P1), zero3, rng) - Mat::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((gate_matrix(GateSpec::make(GateId::NL2), zero3, rng) - Mat::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    // closed form via the magic-basis diagonal equals the commuting-product oracle
    RngHandle prng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const double tx = prng.uniform(-1, 2), ty = prng.uniform(-1, 2), tz = prng.uniform(-1, 2);
        CHECK((nl2_matrix(tx, ty, tz) - nl2_oracle(tx, ty, tz)).cwiseAbs().maxCoeff() < 1e-12);
    }
    // SPE2(ty) == NL2(0.5, ty, 0) entrywise
    for (int rep = 0; rep < 100; ++rep) {
        const double ty = prng.uniform(0, 0.5);
        CHECK((spe2_matrix(ty) - nl2_matrix(0.5, ty, 0.0)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(gate_matrix(GateSpec::make(GateId::P1), std::vector<double>{1.0}, rng),
                    std::invalid_argument);
}

TEST_CASE("file gates load and validate") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qforge_gatelib_test";
    fs::create_directories(dir);
    RngHandle rng(4);
    const Mat u = haar_unitary(2, rng);
    save_matrix_text(u, (dir / "g.txt").string());

    GateSpec f1 = GateSpec::make(GateId::F1);
    f1.file_path = (dir / "g.txt").string();
    CHECK((gate_matrix(f1, {}, rng) - u).cwiseAbs().maxCoeff() < 1e-15);

    // non-unitary file -> validation error naming the file
    Mat bad = u;
    bad(0, 0) += 0.1;
    save_matrix_text(bad, (dir / "bad.txt").string());
    f1.file_path = (dir / "bad.txt").string();
    CHECK_THROWS_AS(gate_matrix(f1, {}, rng), ValidationError);

    f1.file_path = (dir / "missing.txt").string();
    CHECK_THROWS_AS(gate_matrix(f1, {}, rng), IoError);
    fs::remove_all(dir);
}

TEST_CASE("assemble_gateset freezes, validates, and packs parameters") {
    RngHandle rng(7);
    const auto ht = std::vector<GateSpec>{GateSpec::make(GateId::H1), GateSpec::make(GateId::T1)};
    const GateSet gs = assemble_gateset(ht, {}, rng, true, "HT");
    CHECK(gs.specs.size() == 2);
    CHECK(gs.param_count() == 0);

    // effective basis {H, T, T'}: H is self-inverse so its dagger deduplicates
    const auto eff = effective_one_qubit_gates(gs, true);
    CHECK(eff.size() == 3);
    for (const auto& g : eff) {
        REQUIRE(g.dagger_index >= 0);
        CHECK(operator_distance(Mat(eff[g.dagger_index].matrix), Mat(g.matrix.adjoint())) < 1e-9);
    }

    // {P1, P1} with 6 parameters -> 6-dimensional search space
    const auto pp = std::vector<GateSpec>{GateSpec::make(GateId::P1), GateSpec::make(GateId::P1)};
    const GateSet gs2 = assemble_gateset(pp, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, rng, false, "PP");
    CHECK(gs2.param_count() == 6);
    CHECK((gs2.matrices[0] - p1_matrix(0.1, 0.2, 0.3)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(assemble_gateset(pp, {0.1}, rng, false, "PP"), std::invalid_argument);

    // R1 freezes identically under identical seeds
    const auto r1 = std::vector<GateSpec>{GateSpec::make(GateId::R1)};
    RngHandle ra(7), rb(7);
    const GateSet ga = assemble_gateset(r1, {}, ra, false, "R");
    const GateSet gb = assemble_gateset(r1, {}, rb, false, "R");
    CHECK((ga.matrices[0] - gb.matrices[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("circuit evaluation semantics") {
    RngHandle rng(3);
    const auto specs = std::vector<GateSpec>{GateSpec::make(GateId::H1), GateSpec::make(GateId::CX2)};
    const GateSet gs = assemble_gateset(specs, {}, rng, false, "bell");

    Circuit empty;
    empty.n_qubits = 2;
    empty.gateset_label = "bell";
    CHECK((circuit_unitary(empty, gs) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(circuit_depth(empty) == 0);

    // H on qubit 0 then CX(0,1): Bell preparation, first column (1,0,0,1)/sqrt(2)
    Circuit bell = empty;
    bell.ops.push_back({0, {0}});
    bell.ops.push_back({1, {0, 1}});
    const Mat u = circuit_unitary(bell, gs);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(u(0, 0) - cplx(r, 0)) < 1e-12);
    CHECK(std::abs(u(1, 0)) < 1e-12);
    CHECK(std::abs(u(2, 0)) < 1e-12);
    CHECK(std::abs(u(3, 0) - cplx(r, 0)) < 1e-12);
    CHECK(circuit_depth(bell) == 2);

    // circuit followed by its reversed dagger is the identity
    Circuit inv = bell;
    for (auto it = bell.ops.rbegin(); it != bell.ops.rend(); ++it) {
        CircuitOp op = *it;
        op.dagger = !op.dagger;
        inv.ops.push_back(op);
    }
    CHECK((circuit_unitary(inv, gs) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    Circuit bad = empty;
    bad.ops.push_back({0, {5}});
    CHECK_THROWS_AS(circuit_unitary(bad, gs), std::invalid_argument);
    Circuit dup = empty;
    dup.ops.push_back({1, {1, 1}});
    CHECK_THROWS_AS(circuit_unitary(dup, gs), std::invalid_argument);
}

TEST_CASE("circuit composition is a monoid homomorphism") {
    RngHandle rng(12);
    const auto specs = std::vector<GateSpec>{GateSpec::make(GateId::H1), GateSpec::make(GateId::T1),
                                             GateSpec::make(GateId::CX2)};
    const GateSet gs = assemble_gateset(specs, {}, rng, false, "htc");
    for (int rep = 0; rep < 20; ++rep) {
        Circuit c1, c2;
        c1.n_qubits = c2.n_qubits = 2;
        c1.gateset_label = c2.gateset_label = "htc";
        auto rand_ops = [&](Circuit& c, int len) {
            for (int i = 0; i < len; ++i) {
                const int g = static_cast<int>(rng.uniform_int(3));
                if (gs.specs[g].arity == 1) {
                    c.ops.push_back({g, {static_cast<int>(rng.uniform_int(2))}});
                } else {
                    c.ops.push_back({g, {0, 1}});
                }
            }
        };
        rand_ops(c1, 4);
        rand_ops(c2, 3);
        Circuit cat = c1;
        cat.ops.insert(cat.ops.end(), c2.ops.begin(), c2.ops.end());
        const Mat lhs = circuit_unitary(cat, gs);
        const Mat rhs = circuit_unitary(c2, gs) * circuit_unitary(c1, gs);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("embed_gate places qubit 0 as the most significant bit") {
    RngHandle rng(5);
    const Mat cx = fixed_gate(GateId::CX2);
    // CX with control 0, target 2 in a 3-qubit register: |100> -> |101>
    const Mat e = embed_gate(cx, {0, 2}, 3);
    CHECK(std::abs(e(5, 4) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(e(0, 0) - cplx(1, 0)) < 1e-15);
    // reversed qubit order: control 2, target 0: |001> -> |101>
    const Mat f = embed_gate(cx, {2, 0}, 3);
    CHECK(std::abs(f(5, 1) - cplx(1, 0)) < 1e-15);

    // embedding is multiplicative
    const Mat a = haar_unitary(2, rng), b = haar_unitary(2, rng);
    const Mat lhs = embed_gate(a, {1}, 3) * embed_gate(b, {1}, 3);
    const Mat rhs = embed_gate(Mat(a * b), {1}, 3);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

#include "qforge/optimize.hpp"

TEST_CASE("P1 covers the fixed 1-qubit catalog (optimizer self-test)") {
    RngHandle rng(77);
    for (GateId id : {GateId::H1, GateId::T1, GateId::TD1, GateId::S1, GateId::Z1, GateId::X1}) {
        const Mat target = fixed_gate(id);
        const ObjectiveFn fn = [&](const Eigen::VectorXd& a) {
            return 1.0 - process_fidelity(p1_matrix(a(0), a(1), a(2)), target);
        };
        Eigen::VectorXd lo(3), hi(3);
        lo << 0, 0, 0;
        hi << M_PI, 2 * M_PI, 2 * M_PI;
        double best = 1.0;
        for (int restart = 0; restart < 8 && best > 1e-10; ++restart) {
            Eigen::VectorXd x0(3);
            for (int i = 0; i < 3; ++i) x0(i) = rng.uniform(lo(i), hi(i));
            TrustRegionOptions opts;
            opts.max_evals = 4000;
            opts.radius_tol = 1e-9;
            best = std::min(best, minimize_trust_region(fn, x0, lo, hi, opts).fx);
        }
        INFO("gate ", static_cast<int>(id));
        CHECK(best < 1e-10);
    }
}
