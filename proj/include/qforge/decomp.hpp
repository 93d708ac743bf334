#pragma once

#include "qforge/gatelib.hpp"
#include "qforge/matcore.hpp"

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qf {

enum class Method { SKD, RD, KAK, QSD, Pipeline };
std::string method_name(Method m);

struct DecompositionResult {
    Circuit circuit;
    GateSet gate_set;  // the set circuit.ops index into (input set or synthesized)
    double fidelity = 0.0;
    int depth = 0;
    Method method = Method::RD;
    double elapsed = 0.0;  // seconds
    int entangler_count = 0;  // number of 2-qubit ops in the emitted circuit
};

// ---------------------------------------------------------------- KAK

/// u = phase * (k3 ox k4) * NL2(t) * (k1 ox k2), with t in the Weyl chamber
/// (tx >= ty >= tz >= 0, tx + ty <= 1, and tx <= 1/2 when tz = 0).
struct CanonicalForm {
    Mat2 k1, k2, k3, k4;
    Eigen::Vector3d t;
    cplx phase;
};

CanonicalForm kak_canonicalize(const Mat& u);

/// Chamber reduction on bare coordinates (no gate compensation).
Eigen::Vector3d weyl_canonicalize(Eigen::Vector3d t);

/// u (2x2 unitary) = e^{i alpha} * P1(theta, phi, lam).
void zyz_angles(const Mat& u, double& alpha, double& theta, double& phi, double& lam);

/// Alternating local-layer / entangler synthesis:
/// u = phase * L_k * E * L_{k-1} * ... * E * L_0 with L_i = a_i ox b_i.
struct EntanglerSynthesis {
    std::vector<std::array<Mat2, 2>> locals;  // k+1 layers, L_0 first
    int applications = 0;
    cplx phase = 1.0;
    double fidelity = 0.0;
    bool exact = false;
};

/// Fit u over {entangler, arbitrary locals} with at most max_apps entangler
/// applications. Exact closed forms: k=0 (local class), k=1 (matching
/// canonical class, any entangler), k=2/k=3 for entanglers locally equivalent
/// to CX. Everything else falls back to derivative-free fitting. Returns the
/// smallest k reaching fidelity >= 1 - 1e-9, else the best k overall.
EntanglerSynthesis kak_fit_entangler(const Mat& u, const Mat& entangler, int max_apps, RngHandle& rng);

/// Same, materialized as a Circuit over a synthesized gate set
/// [entangler_spec, P1 locals...].
DecompositionResult kak_resynthesize(const Mat& u, const GateSpec& entangler_spec,
                                     const Mat& entangler, int max_apps, RngHandle& rng);

// ---------------------------------------------------------------- SKD

struct SkBasis {
    std::vector<EffectiveGate> gates;
    std::vector<std::vector<int>> sequences;  // circuit order (first applied first)
    std::vector<Mat> products;                // cached product per sequence
    int max_depth = 0;
};

/// All sequences over the effective gates (daggers included) up to the given
/// length, near-duplicates pruned at operator distance < 1e-6.
SkBasis skd_build_basis(const GateSet& gs, int depth, std::size_t cap = 2000000);

/// Index of the basis entry minimizing phase-aligned operator distance; ties
/// broken by shorter sequence, then lower index.
std::pair<int, double> skd_best_approx(const Mat& u, const SkBasis& basis);

/// Balanced group commutator: delta = V W V^dag W^dag up to global phase, with
/// ||V - I||, ||W - I|| = O(sqrt(||delta - I||)).
void skd_group_commutator(const Mat& delta, Mat& v, Mat& w);

DecompositionResult skd_decompose(const Mat& u, const GateSet& gs, int recursion, int basis_depth);
DecompositionResult skd_decompose(const Mat& u, const GateSet& gs, int recursion, const SkBasis& basis);

// ---------------------------------------------------------------- RD

/// Candidate-selection metric. Process compares full operators; State scores
/// only the image of |0> (for state-preparation datasets). The result's
/// stored fidelity is always the process fidelity.
enum class FidelityKind { Process, State };

DecompositionResult rd_decompose(const Mat& u, const GateSet& gs, int max_length, int trials,
                                 RngHandle& rng, FidelityKind objective = FidelityKind::Process);

// ---------------------------------------------------------------- QSD

/// Exact recursive synthesis over {CX, 1-qubit rotations}: cosine-sine
/// decomposition, demultiplexing, Gray-ladder multiplexed rotations, with
/// 2-qubit blocks terminated by kak_resynthesize on CX.
DecompositionResult qsd_decompose(const Mat& u);

// ---------------------------------------------------------------- pipeline

enum class OneQubitMethod { SKD, RD };
enum class TwoQubitMethod { KAK, RD };
enum class NQubitMethod { QSD, RD };

struct PipelineConfig {
    OneQubitMethod oneq = OneQubitMethod::SKD;
    TwoQubitMethod twoq = TwoQubitMethod::KAK;
    NQubitMethod nq = NQubitMethod::QSD;
    int basis_depth = 6;
    int recursion = 2;
    int rd_trials = 500;
    int rd_max_length = 20;
    int max_apps = 3;
    // objective for top-level RD candidate selection; nested local fits always
    // compare full operators
    FidelityKind objective = FidelityKind::Process;
};

/// Shared SK-basis cache for repeated decompositions over one gate set. The
/// pipeline only reads it; callers that fan out work across threads must
/// populate it up front (evaluate_gateset does).
struct PipelineScratch {
    std::optional<SkBasis> sk_basis;
};

/// The 1-qubit members of gs as a standalone set (same label); orig_indices
/// maps subset gate indices back to gs spec indices.
GateSet one_qubit_subset(const GateSet& gs, std::vector<int>* orig_indices = nullptr);

/// Method routing per the unitary's size: dim 2 -> oneq; dim 4 -> KAK onto the
/// set's 2-qubit entangler (locals re-decomposed by oneq) or RD; dim >= 8 ->
/// QSD, CXs re-synthesized onto the entangler, locals via oneq. The result's
/// fidelity is recomputed end-to-end against u.
DecompositionResult decompose_pipeline(const Mat& u, const GateSet& gs, const PipelineConfig& cfg,
                                       RngHandle& rng, PipelineScratch* scratch = nullptr);

}  // namespace qf
