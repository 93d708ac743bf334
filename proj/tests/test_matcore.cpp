#include "qforge/matcore.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace qf;

namespace {

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat tgate() {
    Mat m(2, 2);
    m << 1, 0, 0, std::polar(1.0, M_PI / 4);
    return m;
}

}  // namespace

TEST_CASE("rng determinism and stream splitting") {
    RngHandle a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    RngHandle c(42), d(43);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ |= c.next_u64() != d.next_u64();
    CHECK(differ);
    CHECK(RngHandle(7).child(3).seed() == RngHandle(7).child(3).seed());
    CHECK(RngHandle(7).child(3).seed() != RngHandle(7).child(4).seed());
}

TEST_CASE("rng uniform and normal sanity") {
    RngHandle rng(1);
    double mn = 1, mx = 0, sum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        m1 += z;
        m2 += z * z;
    }
    CHECK(m1 / n == doctest::Approx(0.0).epsilon(0.05));
    CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("haar_unitary basic contracts") {
    RngHandle rng(5);
    CHECK_THROWS_AS(haar_unitary(0, rng), std::invalid_argument);

    // dim 1: a unit-modulus scalar
    const Mat u1 = haar_unitary(1, rng);
    CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-12);

    for (int dim : {2, 4, 8}) {
        for (int rep = 0; rep < 20; ++rep) {
            CHECK(is_unitary(haar_unitary(dim, rng), kUnitaryTol));
        }
    }

    RngHandle r1(99), r2(99);
    const Mat a = haar_unitary(4, r1);
    const Mat b = haar_unitary(4, r2);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // bitwise equal under equal seeds
}

TEST_CASE("haar moment: E|Tr U|^2 = 1 at dim 2") {
    RngHandle rng(2024);
    double acc = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        acc += std::norm(haar_unitary(2, rng).trace());
    }
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("process_fidelity examples and properties") {
    const Mat i2 = Mat::Identity(2, 2);
    CHECK(process_fidelity(i2, i2) == doctest::Approx(1.0));
    CHECK(process_fidelity(i2, pauli_x()) == doctest::Approx(0.0));
    CHECK(process_fidelity(i2, tgate()) == doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-12));

    RngHandle rng(7);
    for (int rep = 0; rep < 1000; ++rep) {
        const Mat a = haar_unitary(2, rng);
        const Mat b = haar_unitary(2, rng);
        CHECK(process_fidelity(a, b) == doctest::Approx(process_fidelity(b, a)).epsilon(1e-12));
    }
    for (int rep = 0; rep < 50; ++rep) {
        const Mat a = haar_unitary(4, rng);
        const Mat b = haar_unitary(4, rng);
        const cplx ph = std::polar(1.0, rng.uniform(0, 2 * M_PI));
        CHECK(std::abs(process_fidelity(a * ph, b) - process_fidelity(a, b)) < 1e-12);
    }
    CHECK_THROWS_AS(process_fidelity(Mat::Identity(2, 2), Mat::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("process_fidelity matches the superoperator-form oracle") {
    // brute force: PF = Tr[S_b^dag S_a] / d^2 with S_U = conj(U) kron U
    RngHandle rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        const int dim = rep % 2 == 0 ? 2 : 4;
        const Mat a = haar_unitary(dim, rng);
        const Mat b = haar_unitary(dim, rng);
        const Mat sa = kron(a.conjugate(), a);
        const Mat sb = kron(b.conjugate(), b);
        const double oracle = ((sb.adjoint() * sa).trace() / cplx(dim * dim, 0)).real();
        CHECK(std::abs(process_fidelity(a, b) - oracle) < 1e-12);
    }
}

TEST_CASE("operator_distance examples") {
    const Mat i2 = Mat::Identity(2, 2);
    RngHandle rng(11);
    const Mat u = haar_unitary(2, rng);
    CHECK(operator_distance(u, u) < 1e-12);
    // d(I, Z): Tr(Z) = 0 triggers the grid search; brute-force value sqrt(2)
    CHECK(operator_distance(i2, pauli_z()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    for (double theta : {0.1, 1.0, 2.5}) {
        CHECK(operator_distance(i2, i2 * std::polar(1.0, theta)) < 1e-12);
    }
    CHECK_THROWS_AS(operator_distance(Mat::Identity(2, 2), Mat::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("operator_distance 2x2 closed form agrees with SVD") {
    RngHandle rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        const Mat a = haar_unitary(2, rng);
        const Mat b = haar_unitary(2, rng);
        const cplx tr = (a.adjoint() * b).trace();
        const Mat diff = a - b * (std::abs(tr) / tr);
        Eigen::JacobiSVD<Mat> svd(diff);
        // the closed form cancels when the two singular values nearly coincide,
        // which only happens far from zero distance
        CHECK(std::abs(spectral_norm(diff) - svd.singularValues()(0)) < 1e-8);
    }
}

TEST_CASE("kron semantics") {
    const Mat i2 = Mat::Identity(2, 2);
    CHECK((kron(i2, i2) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    // X on the first (most significant) qubit maps basis index 0 -> 2
    const Mat xi = kron(pauli_x(), i2);
    CHECK(std::abs(xi(2, 0) - cplx(1, 0)) < 1e-15);

    Mat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    const Mat hh = kron(h, h);
    CHECK(((hh * hh) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    RngHandle rng(3);
    const Mat a = haar_unitary(2, rng), b = haar_unitary(2, rng);
    const Mat c = haar_unitary(2, rng), d = haar_unitary(2, rng);
    CHECK((kron(a, b) * kron(c, d) - kron(Mat(a * c), Mat(b * d))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eig_unitary_symmetric: diagonal and engineered inputs") {
    RMat q;
    Vec d;
    eig_unitary_symmetric(Mat::Identity(4, 4), q, d);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(d(i) - cplx(1, 0)) < 1e-10);

    Mat m = Mat::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = -1;
    m(2, 2) = cplx(0, 1);
    m(3, 3) = cplx(0, -1);
    eig_unitary_symmetric(m, q, d);
    const Mat rec = q.cast<cplx>() * d.asDiagonal() * q.transpose().cast<cplx>();
    CHECK((rec - m).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(eig_unitary_symmetric(2.0 * Mat::Identity(4, 4), q, d), std::invalid_argument);
    Mat nonsym = Mat::Identity(4, 4);
    nonsym(0, 1) = 0.5;
    CHECK_THROWS_AS(eig_unitary_symmetric(nonsym, q, d), std::invalid_argument);
}

TEST_CASE("eig_unitary_symmetric: 1000 random symmetric unitaries round trip") {
    RngHandle rng(2718);
    for (int rep = 0; rep < 1000; ++rep) {
        // random real orthogonal Q0 (QR of a Gaussian), unit-modulus spectrum
        Eigen::MatrixXd g(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) g(i, j) = rng.normal();
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        const Eigen::MatrixXd q0 = qr.householderQ();
        Vec spec(4);
        // every third case gets a degenerate pair of eigenvalues
        const double a0 = rng.uniform(0, 2 * M_PI);
        const double a1 = rng.uniform(0, 2 * M_PI);
        spec(0) = std::polar(1.0, a0);
        spec(1) = std::polar(1.0, rep % 3 == 0 ? a0 : rng.uniform(0, 2 * M_PI));
        spec(2) = std::polar(1.0, a1);
        spec(3) = std::polar(1.0, rep % 5 == 0 ? a1 : rng.uniform(0, 2 * M_PI));
        const Mat m = q0.cast<cplx>() * spec.asDiagonal() * q0.transpose().cast<cplx>();

        RMat q;
        Vec d;
        eig_unitary_symmetric(m, q, d);
        CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
        const Mat rec = q.cast<cplx>() * d.asDiagonal() * q.transpose().cast<cplx>();
        REQUIRE((rec - m).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("matrix file round trips") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qforge_matcore_test";
    fs::create_directories(dir);
    RngHandle rng(9);
    const Mat u = haar_unitary(4, rng);

    const std::string txt = (dir / "u.txt").string();
    save_matrix_text(u, txt);
    CHECK((load_matrix(txt) - u).cwiseAbs().maxCoeff() < 1e-15);

    const std::string bin = (dir / "u.umat").string();
    save_matrix_binary(u, bin);
    CHECK((load_matrix(bin) - u).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(load_matrix((dir / "missing.txt").string()), IoError);
    fs::remove_all(dir);
}
