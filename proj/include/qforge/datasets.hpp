#pragma once

#include "qforge/matcore.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qf {

enum class DatasetKind {
    HaarUnitary,
    HaarState,
    GoldenEquispaced,
    U3Grid,
    StabMagic,
    WeylRandom,
    WeylEquispacedNonlocal,
    FromFiles,
};

std::string dataset_kind_name(DatasetKind k);
DatasetKind dataset_kind_from_name(const std::string& name);

struct Dataset {
    int n_qubits = 1;
    std::vector<Mat> unitaries;
    DatasetKind kind = DatasetKind::HaarUnitary;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> source_paths;

    int size() const { return static_cast<int>(unitaries.size()); }
};

Dataset gen_haar_unitaries(int n_qubits, int size, RngHandle& rng);

/// Each member's first column is a Haar-random state (a Haar unitary is the
/// Gram-Schmidt completion of a random basis, so this is a Haar unitary).
Dataset gen_haar_states(int n_qubits, int size, RngHandle& rng);

/// Fibonacci-sphere points: theta_i = acos(1 - 2(i+0.5)/size), phi_i = 2 pi i / golden,
/// emitted as the state-preparation unitaries P1(theta_i, phi_i, 0). Deterministic.
Dataset gen_golden_equispaced(int size);

/// Cartesian midpoint grid over P1's parameter domains; size = resolution^3.
Dataset gen_u3_grid(int resolution);

/// 14 state-preparation unitaries: members 0-5 the cardinal Bloch states
/// (+Z, -Z, +X, -X, +Y, -Y), members 6-13 the magic states with Bloch vectors
/// (+-1, +-1, +-1)/sqrt(3) in sign-lexicographic order.
Dataset gen_stab_magic();

/// NL2(t) with t uniform over the Weyl chamber (uniform cube canonicalized).
Dataset gen_weyl_random(int size, RngHandle& rng);

/// NL2(t) on a regular chamber grid, identity class dropped, trimmed to size
/// by greedy largest-minimum-distance selection.
Dataset gen_weyl_equispaced_nonlocal(int size);

Dataset load_dataset(const std::vector<std::string>& paths, int n_qubits);

/// 1-qubit: Bloch coordinates of U|0>; 2-qubit: canonical (tx, ty, tz).
/// CSV with header "index,x,y,z" or "index,tx,ty,tz".
std::string export_coords(const Dataset& ds);

}  // namespace qf
