#include "qforge/decomp.hpp"
#include "qforge/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qf {

std::string method_name(Method m) {
    switch (m) {
        case Method::SKD: return "SKD";
        case Method::RD: return "RD";
        case Method::KAK: return "KAK";
        case Method::QSD: return "QSD";
        case Method::Pipeline: return "pipeline";
    }
    return "?";
}

namespace {

const cplx kI(0.0, 1.0);

Mat2 pauli_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
Mat2 pauli_y() { Mat2 m; m << 0, -kI, kI, 0; return m; }
Mat2 pauli_z() { Mat2 m; m << 1, 0, 0, -1; return m; }

Mat2 rot_about(const Eigen::Vector3d& axis, double theta) {
    const Eigen::Vector3d n = axis.normalized();
    const Mat2 p = n(0) * pauli_x() + n(1) * pauli_y() + n(2) * pauli_z();
    return std::cos(theta / 2) * Mat2::Identity() - kI * std::sin(theta / 2) * p;
}

Mat2 rx(double a) { return rot_about({1, 0, 0}, a); }
Mat2 rz(double a) { return rot_about({0, 0, 1}, a); }

/// Nearest Kronecker factorization of a 4x4 into a ox b via the rank-1 SVD of
/// the rearranged matrix; returns the residual of the rank-1 fit.
double kron_factor(const Mat& g, cplx& phase, Mat2& a, Mat2& b) {
    Mat r(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) r(2 * i + j, 2 * k + l) = g(2 * i + k, 2 * j + l);
    Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s0 = svd.singularValues()(0);
    const double resid = svd.singularValues()(1);
    Eigen::Vector4cd va = svd.matrixU().col(0) * std::sqrt(s0);
    Eigen::Vector4cd vb = svd.matrixV().col(0).conjugate() * std::sqrt(s0);
    a << va(0), va(1), va(2), va(3);
    b << vb(0), vb(1), vb(2), vb(3);
    const cplx da = a.determinant();
    const cplx db = b.determinant();
    a /= std::sqrt(da);
    b /= std::sqrt(db);
    phase = std::sqrt(da) * std::sqrt(db);
    return resid;
}

struct KakState {
    cplx phase;
    Mat k34;  // 4x4 product k3 ox k4 (kept combined until the end)
    Mat k12;
    Eigen::Vector3d t;
};

// Can(t) = Can(t - e_axis) * (-i) (sigma ox sigma); shifting down absorbs the
// factor into the right local layer and the phase.
void shift_axis(KakState& s, int axis, int delta) {
    const Mat2 p = axis == 0 ? pauli_x() : axis == 1 ? pauli_y() : pauli_z();
    const Mat pp = kron(p, p);
    s.t(axis) += delta;
    s.k12 = pp * s.k12;
    s.phase *= delta < 0 ? -kI : kI;
}

// Can(t') = (a ox b)^dag Can(t) (a ox b)  =>  absorb (a ox b) left, (a ox b)^dag right.
void conj_move(KakState& s, const Mat2& a, const Mat2& b, const Eigen::Vector3d& new_t) {
    const Mat ab = kron(a, b);
    s.k34 = s.k34 * ab;
    s.k12 = ab.adjoint() * s.k12;
    s.t = new_t;
}

void chamber_reduce(KakState& s) {
    const double eps = 1e-12;
    const Mat2 sgate = (Mat2() << 1, 0, 0, kI).finished();
    const Mat2 v90 = rx(M_PI / 2);
    for (int iter = 0; iter < 64; ++iter) {
        bool moved = false;
        for (int ax = 0; ax < 3; ++ax) {
            while (s.t(ax) >= 1.0 - eps) { shift_axis(s, ax, -1); moved = true; }
            while (s.t(ax) < -eps) { shift_axis(s, ax, +1); moved = true; }
        }
        if (s.t(0) < s.t(1) - eps) {
            conj_move(s, sgate, sgate, {s.t(1), s.t(0), s.t(2)});
            moved = true;
        }
        if (s.t(1) < s.t(2) - eps) {
            conj_move(s, v90, v90, {s.t(0), s.t(2), s.t(1)});
            moved = true;
        }
        if (s.t(0) < s.t(1) - eps) {
            conj_move(s, sgate, sgate, {s.t(1), s.t(0), s.t(2)});
            moved = true;
        }
        if (s.t(0) + s.t(1) > 1.0 + eps) {
            conj_move(s, pauli_z(), Mat2::Identity(), {-s.t(0), -s.t(1), s.t(2)});
            moved = true;
            continue;  // re-normalize into [0,1) first
        }
        if (s.t(2) < eps && s.t(0) > 0.5 + eps) {
            // tz = 0 boundary identification: (tx, ty, 0) ~ (1 - tx, ty, 0)
            conj_move(s, pauli_y(), Mat2::Identity(), {-s.t(0), s.t(1), -s.t(2)});
            moved = true;
            continue;
        }
        if (!moved) break;
    }
    for (int ax = 0; ax < 3; ++ax) {
        if (std::abs(s.t(ax)) < 1e-14) s.t(ax) = 0.0;
    }
}

}  // namespace

Eigen::Vector3d weyl_canonicalize(Eigen::Vector3d t) {
    const double eps = 1e-12;
    auto mod1 = [](double x) {
        double y = std::fmod(x, 1.0);
        if (y < 0) y += 1.0;
        return y;
    };
    for (int iter = 0; iter < 64; ++iter) {
        for (int ax = 0; ax < 3; ++ax) t(ax) = mod1(t(ax));
        std::sort(t.data(), t.data() + 3, std::greater<double>());
        if (t(0) + t(1) > 1.0 + eps) {
            t(0) = 1.0 - t(0);
            t(1) = 1.0 - t(1);
            continue;
        }
        if (t(2) < eps && t(0) > 0.5 + eps) {
            t(0) = 1.0 - t(0);
            continue;
        }
        break;
    }
    for (int ax = 0; ax < 3; ++ax) {
        if (std::abs(t(ax)) < 1e-14) t(ax) = 0.0;
    }
    return t;
}

CanonicalForm kak_canonicalize(const Mat& u) {
    if (u.rows() != 4 || u.cols() != 4) throw std::invalid_argument("kak_canonicalize: input must be 4x4");
    require_unitary(u, 1e-8, "kak_canonicalize");

    const cplx det = u.determinant();
    const cplx gph = std::pow(det, 0.25);
    Mat su = u / gph;

    const Mat4 m = magic_gate();
    const Mat v = m.adjoint() * su * m;
    const Mat w = v.transpose() * v;

    RMat q;
    Vec lam;
    eig_unitary_symmetric(w, q, lam);

    const Mat vq = v * q.cast<cplx>();
    Vec d(4);
    RMat o2(4, 4);
    for (int j = 0; j < 4; ++j) {
        cplx dj = std::sqrt(lam(j));
        Eigen::Vector4cd col = vq.col(j) / dj;
        if (col.imag().cwiseAbs().maxCoeff() > 1e-7) {
            dj = -dj;
            col = -col;
        }
        if (col.imag().cwiseAbs().maxCoeff() > 1e-6) {
            throw ValidationError("kak_canonicalize: internal consistency failure (non-real orthogonal factor)");
        }
        d(j) = dj;
        o2.col(j) = col.real();
    }
    if (o2.determinant() < 0) {
        o2.col(0) *= -1.0;
        d(0) = -d(0);
    }

    Eigen::Vector4d phi;
    for (int j = 0; j < 4; ++j) phi(j) = std::arg(d(j));
    KakState st;
    st.t = {-(phi(0) + phi(2)) / M_PI, -(phi(1) + phi(2)) / M_PI, -(phi(0) + phi(1)) / M_PI};
    st.phase = gph;
    st.k34 = m * o2.cast<cplx>() * m.adjoint();
    st.k12 = m * q.transpose().cast<cplx>() * m.adjoint();
    chamber_reduce(st);

    CanonicalForm cf;
    cf.t = st.t;
    cplx p34, p12;
    const double r34 = kron_factor(st.k34, p34, cf.k3, cf.k4);
    const double r12 = kron_factor(st.k12, p12, cf.k1, cf.k2);
    if (r34 > 1e-6 || r12 > 1e-6) {
        throw ValidationError("kak_canonicalize: Kronecker factorization residual above 1e-6");
    }
    cf.phase = st.phase * p34 * p12;

    const Mat rec = cf.phase * kron(cf.k3, cf.k4) * nl2_matrix(cf.t(0), cf.t(1), cf.t(2)) * kron(cf.k1, cf.k2);
    if ((rec - u).cwiseAbs().maxCoeff() > kDecompTol) {
        throw ValidationError("kak_canonicalize: reconstruction check failed");
    }
    return cf;
}

void zyz_angles(const Mat& u, double& alpha, double& theta, double& phi, double& lam) {
    if (u.rows() != 2 || u.cols() != 2) throw std::invalid_argument("zyz_angles: input must be 2x2");
    const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const double half_det_arg = std::arg(det) / 2;
    const Mat2 su = u * std::polar(1.0, -half_det_arg);
    theta = 2.0 * std::atan2(std::abs(su(1, 0)), std::abs(su(0, 0)));
    if (std::abs(su(0, 0)) < 1e-12) {
        lam = 0.0;
        phi = 2.0 * std::arg(su(1, 0));
    } else if (std::abs(su(1, 0)) < 1e-12) {
        lam = 0.0;
        phi = 2.0 * std::arg(su(1, 1));
    } else {
        phi = std::arg(su(1, 0)) - std::arg(su(0, 0));
        lam = std::arg(-su(0, 1)) - std::arg(su(0, 0));
    }
    alpha = half_det_arg - (phi + lam) / 2;
}

namespace {

bool near(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double tol = 1e-9) {
    return (a - b).cwiseAbs().maxCoeff() < tol;
}

bool is_cx_class(const Eigen::Vector3d& t) {
    return near(t, {0.5, 0.0, 0.0});
}

Mat cx_matrix() {
    Mat u = Mat::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1;
    return u;
}

struct LayerSeq {
    // matrices applied right-to-left: total = phase * L_k * E * ... * E * L_0
    std::vector<std::array<Mat2, 2>> locals;
    cplx phase = 1.0;
};

Mat assemble_layers(const LayerSeq& seq, const Mat& entangler) {
    Mat acc = kron(seq.locals[0][0], seq.locals[0][1]);
    for (std::size_t i = 1; i < seq.locals.size(); ++i) {
        acc = entangler * acc;
        acc = kron(seq.locals[i][0], seq.locals[i][1]) * acc;
    }
    return seq.phase * acc;
}

void merge_left(LayerSeq& seq, const Mat2& a, const Mat2& b) {
    seq.locals.back()[0] = a * seq.locals.back()[0];
    seq.locals.back()[1] = b * seq.locals.back()[1];
}

void merge_right(LayerSeq& seq, const Mat2& a, const Mat2& b) {
    seq.locals.front()[0] = seq.locals.front()[0] * a;
    seq.locals.front()[1] = seq.locals.front()[1] * b;
}

/// Exact layers for Can(x,y,0) over literal CX:
/// Can(x,0,y) = CX (Rx(pi x) ox Rz(pi y)) CX, conjugated by g = Rx(pi/2) on
/// both qubits to swap the y/z coordinate roles.
LayerSeq can_xy0_layers(double x, double y) {
    const Mat2 g = rx(M_PI / 2);
    const Mat2 gd = g.adjoint();
    LayerSeq seq;
    seq.locals.push_back({gd, gd});
    seq.locals.push_back({rx(M_PI * x), rz(M_PI * y)});
    seq.locals.push_back({g, g});
    return seq;
}

/// Exact layers for Can(t) over literal CX with 3 applications:
/// class(Can(t) * CX) always lies on the tz = 0 plane, so peel one CX and
/// synthesize the remainder with two.
LayerSeq can_general_layers(const Eigen::Vector3d& t) {
    const Mat can = nl2_matrix(t(0), t(1), t(2));
    const CanonicalForm w0 = kak_canonicalize(can * cx_matrix());
    LayerSeq seq = can_xy0_layers(w0.t(0), w0.t(1));
    merge_left(seq, w0.k3, w0.k4);
    merge_right(seq, w0.k1, w0.k2);
    seq.phase *= w0.phase;
    // append the peeled CX on the right: insert an identity local layer first
    seq.locals.insert(seq.locals.begin(), {Mat2::Identity(), Mat2::Identity()});
    return seq;
}

/// Rewrite layers built over literal CX into layers over an entangler locally
/// equivalent to CX: CX = c (a3 ox a4) E (a1 ox a2).
void rewrite_cx_as(LayerSeq& seq, const CanonicalForm& ent_cf) {
    const CanonicalForm cx_cf = kak_canonicalize(cx_matrix());
    const cplx c = cx_cf.phase / ent_cf.phase;
    const Mat2 a3 = cx_cf.k3 * ent_cf.k3.adjoint();
    const Mat2 a4 = cx_cf.k4 * ent_cf.k4.adjoint();
    const Mat2 a1 = ent_cf.k1.adjoint() * cx_cf.k1;
    const Mat2 a2 = ent_cf.k2.adjoint() * cx_cf.k2;
    const int k = static_cast<int>(seq.locals.size()) - 1;
    for (int i = 0; i < k; ++i) {
        seq.locals[i][0] = a1 * seq.locals[i][0];
        seq.locals[i][1] = a2 * seq.locals[i][1];
        seq.locals[i + 1][0] = seq.locals[i + 1][0] * a3;
        seq.locals[i + 1][1] = seq.locals[i + 1][1] * a4;
        seq.phase *= c;
    }
}

EntanglerSynthesis finish(const Mat& u, const Mat& entangler, LayerSeq seq) {
    EntanglerSynthesis out;
    out.locals = std::move(seq.locals);
    out.applications = static_cast<int>(out.locals.size()) - 1;
    out.phase = seq.phase;
    out.fidelity = process_fidelity(assemble_layers({out.locals, out.phase}, entangler), u);
    out.exact = out.fidelity >= 1.0 - 1e-9;
    return out;
}

}  // namespace

EntanglerSynthesis kak_fit_entangler(const Mat& u, const Mat& entangler, int max_apps, RngHandle& rng) {
    if (u.rows() != 4) throw std::invalid_argument("kak_fit_entangler: target must be 4x4");
    const CanonicalForm cf = kak_canonicalize(u);
    const CanonicalForm ent = kak_canonicalize(entangler);

    // k = 0: locally trivial class
    if (max_apps >= 0 && near(cf.t, {0, 0, 0})) {
        LayerSeq seq;
        seq.locals.push_back({cf.k3 * cf.k1, cf.k4 * cf.k2});
        seq.phase = cf.phase;
        EntanglerSynthesis s = finish(u, entangler, std::move(seq));
        if (s.exact) return s;
    }
    // k = 1: canonical classes coincide, Can(t) cancels between the two forms
    if (max_apps >= 1 && near(cf.t, ent.t)) {
        LayerSeq seq;
        seq.locals.push_back({ent.k1.adjoint() * cf.k1, ent.k2.adjoint() * cf.k2});
        seq.locals.push_back({cf.k3 * ent.k3.adjoint(), cf.k4 * ent.k4.adjoint()});
        seq.phase = cf.phase / ent.phase;
        EntanglerSynthesis s = finish(u, entangler, std::move(seq));
        if (s.exact) return s;
    }
    if (is_cx_class(ent.t)) {
        const bool literal_cx = (entangler - cx_matrix()).cwiseAbs().maxCoeff() < 1e-12;
        auto wrap = [&](LayerSeq seq) {
            if (!literal_cx) rewrite_cx_as(seq, ent);
            merge_left(seq, cf.k3, cf.k4);
            merge_right(seq, cf.k1, cf.k2);
            seq.phase *= cf.phase;
            return finish(u, entangler, std::move(seq));
        };
        if (max_apps >= 2 && std::abs(cf.t(2)) < 1e-9) {
            EntanglerSynthesis s = wrap(can_xy0_layers(cf.t(0), cf.t(1)));
            if (s.exact) return s;
        }
        if (max_apps >= 3) {
            EntanglerSynthesis s = wrap(can_general_layers(cf.t));
            if (s.exact) return s;
        }
    }

    // Numeric fallback: fit local layers around k entangler applications by
    // maximizing process fidelity with the derivative-free optimizer.
    EntanglerSynthesis best;
    best.fidelity = -1.0;
    for (int k = 0; k <= max_apps; ++k) {
        const int nparams = 6 * (k + 1);
        auto build = [&](const Eigen::VectorXd& p) {
            LayerSeq seq;
            for (int layer = 0; layer <= k; ++layer) {
                const int o = 6 * layer;
                seq.locals.push_back({Mat2(p1_matrix(p(o), p(o + 1), p(o + 2))),
                                      Mat2(p1_matrix(p(o + 3), p(o + 4), p(o + 5)))});
            }
            return seq;
        };
        const ObjectiveFn fn = [&](const Eigen::VectorXd& p) {
            return -process_fidelity(assemble_layers(build(p), entangler), u);
        };
        Eigen::VectorXd lo = Eigen::VectorXd::Zero(nparams);
        Eigen::VectorXd hi(nparams);
        for (int i = 0; i < nparams; ++i) hi(i) = (i % 3 == 0) ? M_PI : 2 * M_PI;
        OptimizeResult kbest;
        kbest.fx = 1.0;
        for (int restart = 0; restart < 3; ++restart) {
            Eigen::VectorXd x0(nparams);
            for (int i = 0; i < nparams; ++i) x0(i) = rng.uniform(lo(i), hi(i));
            TrustRegionOptions topt;
            topt.max_evals = 400 * (k + 1);
            OptimizeResult r = minimize_trust_region(fn, x0, lo, hi, topt);
            if (r.fx < kbest.fx) kbest = r;
            if (-kbest.fx >= 1.0 - 1e-9) break;
        }
        LayerSeq seq = build(kbest.x);
        EntanglerSynthesis s = finish(u, entangler, std::move(seq));
        if (s.exact) return s;
        if (s.fidelity > best.fidelity) best = s;
    }
    return best;
}

DecompositionResult kak_resynthesize(const Mat& u, const GateSpec& entangler_spec,
                                     const Mat& entangler, int max_apps, RngHandle& rng) {
    const auto t0 = std::chrono::steady_clock::now();
    EntanglerSynthesis syn = kak_fit_entangler(u, entangler, max_apps, rng);

    GateSet gs;
    gs.label = "kak:" + entangler_spec.name();
    gs.specs.push_back(entangler_spec);
    gs.matrices.push_back(entangler);
    gs.fab_costs.push_back(entangler_spec.fab_cost);

    Circuit c;
    c.n_qubits = 2;
    c.gateset_label = gs.label;
    auto emit_local = [&](const Mat2& m, int qubit) {
        if ((m - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12) return;
        double alpha, theta, phi, lam;
        zyz_angles(m, alpha, theta, phi, lam);
        if (std::abs(theta) < 1e-12 && std::abs(std::remainder(phi + lam, 2 * M_PI)) < 1e-12) return;
        GateSpec sp = GateSpec::make(GateId::P1);
        gs.specs.push_back(sp);
        gs.matrices.push_back(p1_matrix(theta, phi, lam));
        gs.fab_costs.push_back(sp.fab_cost);
        gs.params.insert(gs.params.end(), {theta, phi, lam});
        c.ops.push_back({static_cast<int>(gs.specs.size()) - 1, {qubit}});
    };
    for (int layer = 0; layer <= syn.applications; ++layer) {
        if (layer > 0) c.ops.push_back({0, {0, 1}});
        emit_local(syn.locals[layer][0], 0);
        emit_local(syn.locals[layer][1], 1);
    }

    DecompositionResult res;
    res.fidelity = process_fidelity(circuit_unitary(c, gs), u);
    res.depth = circuit_depth(c);
    res.method = Method::KAK;
    res.entangler_count = syn.applications;
    res.circuit = std::move(c);
    res.gate_set = std::move(gs);
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace qf
