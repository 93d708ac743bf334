#pragma once

#include "qforge/matcore.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qf {

enum class GateId { R1, P1, T1, TD1, S1, Z1, X1, H1, F1, R2, NL2, CX2, CZ2, B2, SPE2, F2 };
enum class GateKind { Fixed, Parametric, RandomFrozen, File };

struct GateSpec {
    GateId id = GateId::H1;
    int arity = 1;
    GateKind kind = GateKind::Fixed;
    int param_count = 0;
    double fab_cost = 1.0;
    std::string file_path;  // F1/F2 only

    static GateSpec make(GateId id);
    static GateSpec from_name(const std::string& name);
    std::string name() const;
};

/// [lo, hi) search domain per parameter slot of a gate.
struct ParamBounds {
    std::vector<double> lo;
    std::vector<double> hi;
};
ParamBounds param_bounds(const GateSpec& spec);

Mat p1_matrix(double a1, double a2, double a3);
Mat nl2_matrix(double tx, double ty, double tz);
Mat spe2_matrix(double ty);
/// The magic gate M diagonalizing canonical gates (NL2 = M D M^dag).
Mat4 magic_gate();

/// Concrete catalog matrix for a spec. rng is consulted only for R1/R2
/// (freeze-time sampling); wrong parameter count -> invalid_argument;
/// missing/non-unitary gate files -> IoError/ValidationError.
Mat gate_matrix(const GateSpec& spec, std::span<const double> params, RngHandle& rng);

/// Concrete gate used by the decomposition engines (daggers included).
struct EffectiveGate {
    std::string name;
    Mat matrix;
    int arity = 1;
    int spec_index = -1;
    bool is_dagger = false;
    int dagger_index = -1;  // index of the inverse within the effective list
};

struct GateSet {
    std::vector<GateSpec> specs;
    std::vector<double> params;  // concatenated parametric slots
    bool include_daggers = false;
    std::string label;
    std::uint64_t seed = 0;

    std::vector<Mat> matrices;      // frozen matrix per spec
    std::vector<double> fab_costs;  // per spec

    int param_count() const;
    std::vector<int> one_qubit_indices() const;
    std::vector<int> two_qubit_indices() const;
    double mean_fab_cost() const;
};

/// Freezes R1/R2 samples, loads and validates file gates, records fabrication
/// costs. params length must match the total parametric slot count.
GateSet assemble_gateset(const std::vector<GateSpec>& specs, const std::vector<double>& params,
                         RngHandle& rng, bool include_daggers, const std::string& label);

/// 1-qubit gates of gs, plus Hermitian conjugates when with_daggers, with
/// near-duplicates pruned (operator distance < 1e-6) and inverse indices wired.
std::vector<EffectiveGate> effective_one_qubit_gates(const GateSet& gs, bool with_daggers);

struct CircuitOp {
    int gate = 0;             // index into the owning GateSet's specs
    std::vector<int> qubits;  // qubit 0 = most significant bit
    bool dagger = false;      // apply the gate's Hermitian conjugate
};

struct Circuit {
    int n_qubits = 1;
    std::vector<CircuitOp> ops;  // applied left to right
    std::string gateset_label;
};

/// Lift a k-qubit operator to n qubits at the given qubit indices (qubit 0 is
/// the most significant bit of the state index).
Mat embed_gate(const Mat& g, const std::vector<int>& qubits, int n);

/// Product of the per-op operators; empty circuit -> identity.
Mat circuit_unitary(const Circuit& c, const GateSet& gs);

/// Unified per-gate cost: the op count, not the critical path.
int circuit_depth(const Circuit& c);

/// Line-oriented serialization: header naming the gate set, "op <id> <qubits>"
/// rows, optional "fidelity"/"depth" trailers appended by callers.
std::string circuit_to_text(const Circuit& c, const GateSet& gs);

}  // namespace qf
