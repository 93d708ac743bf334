#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include "qforge/decomp.hpp"

#include <complex>
#include <lapacke.h>

#include <chrono>
#include <cmath>

namespace qf {

namespace {

bool near_identity(const Mat& u, double tol = 1e-12) {
    const cplx tr = u.trace();
    const double atr = std::abs(tr);
    if (atr < 1e-9) return false;
    return (u * (atr / tr) - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < tol;
}

/// Blocked cosine-sine decomposition via LAPACK:
/// U = [u1 0; 0 u2] [C -S; S C] [v1t 0; 0 v2t] with theta the principal angles.
void csd(const Mat& u, Mat& u1, Mat& u2, Eigen::VectorXd& theta, Mat& v1t, Mat& v2t) {
    const int m = static_cast<int>(u.rows());
    const int p = m / 2;
    Mat x11 = u.topLeftCorner(p, p);
    Mat x12 = u.topRightCorner(p, p);
    Mat x21 = u.bottomLeftCorner(p, p);
    Mat x22 = u.bottomRightCorner(p, p);
    u1.resize(p, p);
    u2.resize(p, p);
    v1t.resize(p, p);
    v2t.resize(p, p);
    theta.resize(p);
    const lapack_int info = LAPACKE_zuncsd(
        LAPACK_COL_MAJOR, 'Y', 'Y', 'Y', 'Y', 'N', 'D', m, p, p,
        x11.data(), p, x12.data(), p, x21.data(), p, x22.data(), p, theta.data(),
        u1.data(), p, u2.data(), p, v1t.data(), p, v2t.data(), p);
    if (info != 0) {
        throw ValidationError("cosine-sine decomposition failed (LAPACK info " + std::to_string(info) + ")");
    }
}

/// Simultaneous unitary diagonalization of a unitary matrix (Hermitian real
/// and imaginary parts commute); used on A1 A2^dag during demultiplexing.
Mat eig_unitary(const Mat& a, Vec& lam) {
    const int n = static_cast<int>(a.rows());
    const Mat h1 = 0.5 * (a + a.adjoint());
    const Mat h2 = cplx(0, -0.5) * (a - a.adjoint());
    auto verify = [&](const Mat& p) {
        lam.resize(n);
        for (int k = 0; k < n; ++k) lam(k) = p.col(k).dot(a * p.col(k));
        return (p * lam.asDiagonal() * p.adjoint() - a).cwiseAbs().maxCoeff() < 1e-10;
    };
    {
        Eigen::SelfAdjointEigenSolver<Mat> es(h1);
        Mat p = es.eigenvectors();
        const Eigen::VectorXd w = es.eigenvalues();
        int i = 0;
        while (i < n) {
            int j = i;
            while (j + 1 < n && std::abs(w(j + 1) - w(i)) < 1e-7) ++j;
            if (j > i) {
                const int mcount = j - i + 1;
                const Mat blk = p.middleCols(i, mcount);
                Mat hp = blk.adjoint() * h2 * blk;
                hp = 0.5 * (hp + hp.adjoint()).eval();
                Eigen::SelfAdjointEigenSolver<Mat> es2(hp);
                p.middleCols(i, mcount) = blk * es2.eigenvectors();
            }
            i = j + 1;
        }
        if (verify(p)) return p;
    }
    RngHandle rng(0xD0D0F00Dull);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const Mat mix = rng.normal() * h1 + rng.normal() * h2;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (mix + mix.adjoint()));
        const Mat p = es.eigenvectors();
        if (verify(p)) return p;
    }
    throw ValidationError("demultiplexing eigendecomposition failed");
}

/// blockdiag(a1, a2) = blockdiag(P, P) . blockdiag(L, L^dag) . blockdiag(Q, Q)
/// with L = diag(exp(i phi)); the middle factor is a multiplexed RZ.
void demultiplex(const Mat& a1, const Mat& a2, Mat& p, Eigen::VectorXd& phis, Mat& q) {
    Vec lam;
    p = eig_unitary(a1 * a2.adjoint(), lam);
    const int n = static_cast<int>(a1.rows());
    phis.resize(n);
    Vec l(n);
    for (int k = 0; k < n; ++k) {
        phis(k) = 0.5 * std::arg(lam(k));
        l(k) = std::polar(1.0, phis(k));
    }
    q = l.conjugate().asDiagonal() * p.adjoint() * a1;
    if ((p * l.asDiagonal() * q - a1).cwiseAbs().maxCoeff() > 1e-9 ||
        (p * l.conjugate().asDiagonal() * q - a2).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError("demultiplexing reconstruction failed");
    }
}

struct QsdOp {
    enum Kind { OneQ, TwoQ, MuxRy, MuxRz } kind;
    Mat m;  // OneQ / TwoQ payload
    Eigen::VectorXd angles;
    int target = 0;
    std::vector<int> qubits;  // TwoQ pair or mux controls
};

void qsd_recurse(const Mat& u, const std::vector<int>& qubits, std::vector<QsdOp>& ops) {
    const int n = static_cast<int>(qubits.size());
    if (near_identity(u)) return;
    if (n == 1) {
        ops.push_back({QsdOp::OneQ, u, {}, qubits[0], {}});
        return;
    }
    if (n == 2) {
        ops.push_back({QsdOp::TwoQ, u, {}, 0, qubits});
        return;
    }
    Mat u1, u2, v1t, v2t;
    Eigen::VectorXd theta;
    csd(u, u1, u2, theta, v1t, v2t);
    const std::vector<int> lower(qubits.begin() + 1, qubits.end());

    Mat pr, qr;
    Eigen::VectorXd phir;
    demultiplex(v1t, v2t, pr, phir, qr);
    qsd_recurse(qr, lower, ops);
    ops.push_back({QsdOp::MuxRz, {}, -2.0 * phir, qubits[0], lower});
    qsd_recurse(pr, lower, ops);

    ops.push_back({QsdOp::MuxRy, {}, 2.0 * theta, qubits[0], lower});

    Mat pl, ql;
    Eigen::VectorXd phil;
    demultiplex(u1, u2, pl, phil, ql);
    qsd_recurse(ql, lower, ops);
    ops.push_back({QsdOp::MuxRz, {}, -2.0 * phil, qubits[0], lower});
    qsd_recurse(pl, lower, ops);
}

int gray(int i) { return i ^ (i >> 1); }

/// Emit shared by QSD and tests: a circuit over [CX2, frozen P1 gates...].
struct SynthBuilder {
    GateSet gs;
    Circuit c;

    explicit SynthBuilder(int n_qubits, const std::string& label) {
        gs.label = label;
        gs.specs.push_back(GateSpec::make(GateId::CX2));
        RngHandle rng(0);
        gs.matrices.push_back(gate_matrix(gs.specs[0], {}, rng));
        gs.fab_costs.push_back(1.0);
        c.n_qubits = n_qubits;
        c.gateset_label = label;
    }

    void cx(int control, int target) { c.ops.push_back({0, {control, target}}); }

    void local(const Mat& m, int qubit) {
        if ((m - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14) return;
        double alpha, theta, phi, lam;
        zyz_angles(m, alpha, theta, phi, lam);
        emit_p1(theta, phi, lam, qubit);
    }

    void rotation(char axis, double angle, int qubit) {
        const double a = std::remainder(angle, 4.0 * M_PI);
        if (std::abs(std::remainder(a, 2.0 * M_PI)) < 1e-12) return;
        if (axis == 'y') {
            emit_p1(a, 0.0, 0.0, qubit);
        } else {
            emit_p1(0.0, a, 0.0, qubit);  // diag(1, e^{ia}) ~ RZ(a) up to global phase
        }
    }

    void emit_p1(double theta, double phi, double lam, int qubit) {
        GateSpec sp = GateSpec::make(GateId::P1);
        gs.specs.push_back(sp);
        gs.matrices.push_back(p1_matrix(theta, phi, lam));
        gs.fab_costs.push_back(sp.fab_cost);
        gs.params.insert(gs.params.end(), {theta, phi, lam});
        c.ops.push_back({static_cast<int>(gs.specs.size()) - 1, {qubit}});
    }
};

void emit_mux(SynthBuilder& b, const QsdOp& op) {
    const int m = static_cast<int>(op.qubits.size());
    const int n_angles = 1 << m;
    if (op.angles.cwiseAbs().maxCoeff() < 1e-12) return;
    // angle transform: theta = M phi, M[j][k] = (-1)^popcount(j & gray(k));
    // M has orthogonal columns with norm sqrt(N), so phi = M^T theta / N.
    Eigen::VectorXd phi(n_angles);
    for (int k = 0; k < n_angles; ++k) {
        double acc = 0;
        for (int j = 0; j < n_angles; ++j) {
            acc += (__builtin_popcount(j & gray(k)) & 1) ? -op.angles(j) : op.angles(j);
        }
        phi(k) = acc / n_angles;
    }
    const char axis = op.kind == QsdOp::MuxRy ? 'y' : 'z';
    for (int k = 0; k < n_angles; ++k) {
        b.rotation(axis, phi(k), op.target);
        const int diff = gray(k) ^ gray((k + 1) % n_angles);
        int bit = 0;
        while ((diff >> (bit + 1)) != 0) ++bit;
        b.cx(op.qubits[m - 1 - bit], op.target);
    }
}

}  // namespace

DecompositionResult qsd_decompose(const Mat& u) {
    const auto t0 = std::chrono::steady_clock::now();
    const int dim = static_cast<int>(u.rows());
    if (!is_power_of_two(dim) || dim < 4) {
        throw std::invalid_argument("qsd_decompose: dimension must be a power of two >= 4");
    }
    require_unitary(u, 1e-8, "qsd_decompose");
    int n = 0;
    while ((1 << n) < dim) ++n;

    std::vector<QsdOp> ops;
    std::vector<int> qubits(n);
    for (int i = 0; i < n; ++i) qubits[i] = i;
    qsd_recurse(u, qubits, ops);

    SynthBuilder b(n, "qsd");
    RngHandle rng(0x05D0ull);
    const Mat cx = b.gs.matrices[0];
    for (const auto& op : ops) {
        switch (op.kind) {
            case QsdOp::OneQ:
                b.local(op.m, op.target);
                break;
            case QsdOp::TwoQ: {
                const EntanglerSynthesis syn = kak_fit_entangler(op.m, cx, 3, rng);
                for (int layer = 0; layer <= syn.applications; ++layer) {
                    if (layer > 0) b.cx(op.qubits[0], op.qubits[1]);
                    b.local(syn.locals[layer][0], op.qubits[0]);
                    b.local(syn.locals[layer][1], op.qubits[1]);
                }
                break;
            }
            case QsdOp::MuxRy:
            case QsdOp::MuxRz:
                emit_mux(b, op);
                break;
        }
    }

    DecompositionResult res;
    res.method = Method::QSD;
    res.fidelity = process_fidelity(circuit_unitary(b.c, b.gs), u);
    res.depth = circuit_depth(b.c);
    for (const auto& op : b.c.ops) {
        if (op.qubits.size() == 2) ++res.entangler_count;
    }
    res.circuit = std::move(b.c);
    res.gate_set = std::move(b.gs);
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace qf
