#include "qforge/decomp.hpp"

#include <chrono>
#include <cmath>

namespace qf {

DecompositionResult rd_decompose(const Mat& u, const GateSet& gs, int max_length, int trials,
                                 RngHandle& rng, FidelityKind objective) {
    if (trials < 1) throw std::invalid_argument("rd_decompose: trials must be >= 1");
    if (max_length < 1) throw std::invalid_argument("rd_decompose: max_length must be >= 1");
    const int dim = static_cast<int>(u.rows());
    if (!is_power_of_two(dim) || dim < 2) throw std::invalid_argument("rd_decompose: bad target dimension");
    int n = 0;
    while ((1 << n) < dim) ++n;
    if (n < 2 && !gs.two_qubit_indices().empty()) {
        throw std::invalid_argument("rd_decompose: 2-qubit gates cannot act on a 1-qubit target");
    }
    if (gs.specs.empty()) throw std::invalid_argument("rd_decompose: empty gate set");

    const auto t0 = std::chrono::steady_clock::now();
    DecompositionResult best;
    best.method = Method::RD;
    best.gate_set = gs;
    best.fidelity = -1.0;
    double best_score = -1.0;

    auto score = [&](const Mat& acc) {
        if (objective == FidelityKind::State) {
            return std::norm(cplx(u.col(0).adjoint() * acc.col(0)));
        }
        return process_fidelity(acc, u);
    };

    const int n_gates = static_cast<int>(gs.specs.size());
    for (int trial = 0; trial < trials; ++trial) {
        const int len = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_length)));
        Circuit c;
        c.n_qubits = n;
        c.gateset_label = gs.label;
        Mat acc = Mat::Identity(dim, dim);
        for (int step = 0; step < len; ++step) {
            const int g = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_gates)));
            CircuitOp op;
            op.gate = g;
            if (gs.specs[g].arity == 1) {
                op.qubits = {static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)))};
            } else {
                const int a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
                int b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
                if (b >= a) ++b;
                op.qubits = {a, b};
            }
            acc = embed_gate(gs.matrices[g], op.qubits, n) * acc;
            c.ops.push_back(std::move(op));
        }
        const double s = score(acc);
        if (s > best_score) {
            best_score = s;
            best.fidelity = process_fidelity(acc, u);
            best.circuit = std::move(c);
        }
    }
    best.depth = circuit_depth(best.circuit);
    for (const auto& op : best.circuit.ops) {
        if (op.qubits.size() == 2) ++best.entangler_count;
    }
    best.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

}  // namespace qf
