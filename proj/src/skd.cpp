#include "qforge/decomp.hpp"

#include <algorithm>
#include <unordered_map>
#include <chrono>
#include <cmath>

namespace qf {

namespace {

const cplx kI(0.0, 1.0);

Mat2 rot_xyz(double nx, double ny, double nz, double theta) {
    Mat2 p;
    p << nz, cplx(nx, -ny), cplx(nx, ny), -nz;
    return std::cos(theta / 2) * Mat2::Identity() - kI * std::sin(theta / 2) * p;
}

/// su2 rotation data: u = cos(theta/2) I - i sin(theta/2) n.sigma
void axis_angle(const Mat2& u, Eigen::Vector3d& n, double& theta) {
    const double c = (u(0, 0) + u(1, 1)).real() / 2;
    const double vx = -(u(0, 1) + u(1, 0)).imag() / 2;
    const double vy = (u(1, 0) - u(0, 1)).real() / 2;
    const double vz = -(u(0, 0) - u(1, 1)).imag() / 2;
    const double s = std::sqrt(vx * vx + vy * vy + vz * vz);
    theta = 2.0 * std::atan2(s, c);
    if (s < 1e-300) {
        n = {0, 0, 1};
    } else {
        n = {vx / s, vy / s, vz / s};
    }
}

/// SU(2) rotation mapping Bloch direction m onto n (shortest arc; the
/// antiparallel case rotates by pi about any orthogonal axis).
Mat2 align_axes(const Eigen::Vector3d& m, const Eigen::Vector3d& n) {
    const double dot = m.dot(n);
    const Eigen::Vector3d cr = m.cross(n);
    if (dot < -1.0 + 1e-9) {
        Eigen::Vector3d o = n.cross(Eigen::Vector3d(1, 0, 0));
        if (o.norm() < 1e-3) o = n.cross(Eigen::Vector3d(0, 1, 0));
        o.normalize();
        return rot_xyz(o(0), o(1), o(2), M_PI);
    }
    const double q0 = 1.0 + dot;
    const double nrm = std::sqrt(q0 * q0 + cr.squaredNorm());
    const Eigen::Vector3d v = cr / nrm;
    Mat2 p;
    p << v(2), cplx(v(0), -v(1)), cplx(v(0), v(1)), -v(2);
    return (q0 / nrm) * Mat2::Identity() - kI * p;
}

/// Solve sin(theta/2) = 2 sin^2(phi/2) sqrt(1 - sin^4(phi/2)) on the monotone
/// branch [0, phi*], phi* = 2 asin(2^(-1/4)) where the left side peaks at 1.
double commutator_angle(double theta) {
    const double target = std::sin(theta / 2);
    const double phi_star = 2.0 * std::asin(std::pow(2.0, -0.25));
    if (target >= 1.0) return phi_star;
    double lo = 0.0, hi = phi_star;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s2 = std::sin(mid / 2) * std::sin(mid / 2);
        const double val = 2.0 * s2 * std::sqrt(std::max(1.0 - s2 * s2, 0.0));
        if (val < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Mat2 to_su2(const Mat& u) {
    const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    return Mat2(u) / std::sqrt(det);
}

std::vector<int> dagger_sequence(const std::vector<int>& seq, const SkBasis& basis) {
    std::vector<int> out;
    out.reserve(seq.size());
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
        const int d = basis.gates[*it].dagger_index;
        if (d < 0) throw std::logic_error("effective gate list is not closed under daggers");
        out.push_back(d);
    }
    return out;
}

struct SkCandidate {
    Mat m;
    std::vector<int> seq;
    double dist = 0.0;
};

SkCandidate sk_recurse(const Mat& u, const SkBasis& basis, int n) {
    if (n == 0) {
        auto [idx, dist] = skd_best_approx(u, basis);
        return {basis.products[idx], basis.sequences[idx], dist};
    }
    SkCandidate prev = sk_recurse(u, basis, n - 1);
    const Mat delta = u * prev.m.adjoint();
    Mat v, w;
    skd_group_commutator(delta, v, w);
    SkCandidate vc = sk_recurse(v, basis, n - 1);
    SkCandidate wc = sk_recurse(w, basis, n - 1);

    SkCandidate cand;
    cand.m = vc.m * wc.m * vc.m.adjoint() * wc.m.adjoint() * prev.m;
    cand.seq = prev.seq;
    const std::vector<int> wd = dagger_sequence(wc.seq, basis);
    const std::vector<int> vd = dagger_sequence(vc.seq, basis);
    cand.seq.insert(cand.seq.end(), wd.begin(), wd.end());
    cand.seq.insert(cand.seq.end(), vd.begin(), vd.end());
    cand.seq.insert(cand.seq.end(), wc.seq.begin(), wc.seq.end());
    cand.seq.insert(cand.seq.end(), vc.seq.begin(), vc.seq.end());
    cand.dist = operator_distance(u, cand.m);
    // best-so-far: the 5-term composition must strictly beat the lower level,
    // otherwise keep the shorter sequence
    return cand.dist < prev.dist ? cand : prev;
}

}  // namespace

SkBasis skd_build_basis(const GateSet& gs, int depth, std::size_t cap) {
    if (!gs.two_qubit_indices().empty()) {
        throw std::invalid_argument("skd_build_basis: gate set must contain only 1-qubit gates");
    }
    if (depth < 1) throw std::invalid_argument("skd_build_basis: depth must be >= 1");

    SkBasis basis;
    basis.max_depth = depth;
    // daggers are auto-added for the SK-basis so the generated group is closed
    // under inversion
    basis.gates = effective_one_qubit_gates(gs, true);
    if (basis.gates.empty()) throw std::invalid_argument("skd_build_basis: gate set has no 1-qubit gates");

    // identity as the empty sequence
    basis.sequences.push_back({});
    basis.products.push_back(Mat::Identity(2, 2));

    // near-duplicate pruning at 1e-6: bucket on the phase-invariant |m(0,0)|
    // so each candidate only scans its own and neighboring buckets
    std::unordered_map<long, std::vector<int>> buckets;
    auto bucket_key = [](const Mat& m) { return std::lround(std::abs(m(0, 0)) * 1e4); };
    buckets[bucket_key(basis.products[0])].push_back(0);

    auto is_new = [&](const Mat& m) {
        const long key = bucket_key(m);
        for (long k = key - 1; k <= key + 1; ++k) {
            const auto it = buckets.find(k);
            if (it == buckets.end()) continue;
            for (int idx : it->second) {
                const double pf = process_fidelity(basis.products[idx], m);
                if (pf > 1.0 - 1e-10 && operator_distance(basis.products[idx], m) < 1e-6) {
                    return false;
                }
            }
        }
        return true;
    };

    std::size_t level_begin = 0;
    for (int d = 1; d <= depth; ++d) {
        const std::size_t level_end = basis.sequences.size();
        for (std::size_t s = level_begin; s < level_end; ++s) {
            for (int g = 0; g < static_cast<int>(basis.gates.size()); ++g) {
                Mat m = basis.gates[g].matrix * basis.products[s];
                if (!is_new(m)) continue;
                std::vector<int> seq = basis.sequences[s];
                seq.push_back(g);
                basis.sequences.push_back(std::move(seq));
                buckets[bucket_key(m)].push_back(static_cast<int>(basis.products.size()));
                basis.products.push_back(std::move(m));
                if (basis.sequences.size() > cap) {
                    throw ResourceLimitError("skd_build_basis: basis exceeds " + std::to_string(cap) +
                                             " entries; reduce the basis depth");
                }
            }
        }
        level_begin = level_end;
    }
    return basis;
}

std::pair<int, double> skd_best_approx(const Mat& u, const SkBasis& basis) {
    if (u.rows() != 2) throw std::invalid_argument("skd_best_approx: target must be 2x2");
    if (basis.sequences.empty()) throw std::invalid_argument("skd_best_approx: empty basis");
    // sequences are generated shortest-first, so keeping the first strict
    // minimum also implements the shorter-sequence / lower-index tie breaks
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(basis.products.size()); ++i) {
        const double d = operator_distance(u, basis.products[i]);
        if (d < best_dist - 1e-12) {
            best = i;
            best_dist = d;
        }
    }
    return {best, best_dist};
}

void skd_group_commutator(const Mat& delta, Mat& v, Mat& w) {
    if (delta.rows() != 2 || delta.cols() != 2) {
        throw std::invalid_argument("skd_group_commutator: input must be 2x2");
    }
    require_unitary(delta, 1e-8, "skd_group_commutator");
    const Mat2 su = to_su2(delta);
    Eigen::Vector3d n;
    double theta;
    axis_angle(su, n, theta);
    if (theta < 1e-14) {
        v = Mat::Identity(2, 2);
        w = Mat::Identity(2, 2);
        return;
    }
    const double phi = commutator_angle(theta);
    const Mat2 vhat = rot_xyz(1, 0, 0, phi);
    const Mat2 what = rot_xyz(0, 1, 0, phi);
    const Mat2 comm = vhat * what * vhat.adjoint() * what.adjoint();
    Eigen::Vector3d m;
    double theta_c;
    axis_angle(comm, m, theta_c);
    const Mat2 s = align_axes(m, n);
    v = s * vhat * s.adjoint();
    w = s * what * s.adjoint();
}

DecompositionResult skd_decompose(const Mat& u, const GateSet& gs, int recursion, int basis_depth) {
    const SkBasis basis = skd_build_basis(gs, basis_depth);
    return skd_decompose(u, gs, recursion, basis);
}

DecompositionResult skd_decompose(const Mat& u, const GateSet& gs, int recursion, const SkBasis& basis) {
    if (u.rows() != 2) throw std::invalid_argument("skd_decompose: target must be 2x2");
    if (recursion < 0) throw std::invalid_argument("skd_decompose: recursion must be >= 0");
    const auto t0 = std::chrono::steady_clock::now();
    const SkCandidate cand = sk_recurse(u, basis, recursion);

    DecompositionResult res;
    res.method = Method::SKD;
    res.gate_set = gs;
    res.circuit.n_qubits = 1;
    res.circuit.gateset_label = gs.label;
    for (int g : cand.seq) {
        const EffectiveGate& eg = basis.gates[g];
        res.circuit.ops.push_back({eg.spec_index, {0}, eg.is_dagger});
    }
    res.depth = circuit_depth(res.circuit);
    res.fidelity = process_fidelity(cand.m, u);
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace qf
