#include "qforge/datasets.hpp"

#include "qforge/decomp.hpp"
#include "qforge/gatelib.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace qf {

std::string dataset_kind_name(DatasetKind k) {
    switch (k) {
        case DatasetKind::HaarUnitary: return "haar-unitary";
        case DatasetKind::HaarState: return "haar-state";
        case DatasetKind::GoldenEquispaced: return "golden-equispaced";
        case DatasetKind::U3Grid: return "u3-grid";
        case DatasetKind::StabMagic: return "stab-magic";
        case DatasetKind::WeylRandom: return "weyl-random";
        case DatasetKind::WeylEquispacedNonlocal: return "weyl-equispaced-nonlocal";
        case DatasetKind::FromFiles: return "from-files";
    }
    return "?";
}

DatasetKind dataset_kind_from_name(const std::string& name) {
    static const std::map<std::string, DatasetKind> kinds = {
        {"haar-unitary", DatasetKind::HaarUnitary},
        {"haar-state", DatasetKind::HaarState},
        {"golden-equispaced", DatasetKind::GoldenEquispaced},
        {"u3-grid", DatasetKind::U3Grid},
        {"stab-magic", DatasetKind::StabMagic},
        {"weyl-random", DatasetKind::WeylRandom},
        {"weyl-equispaced-nonlocal", DatasetKind::WeylEquispacedNonlocal},
        {"from-files", DatasetKind::FromFiles},
    };
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw std::invalid_argument("unknown dataset kind '" + name + "'");
    return it->second;
}

namespace {

void validate_members(const Dataset& ds, double tol) {
    for (std::size_t i = 0; i < ds.unitaries.size(); ++i) {
        if (!is_unitary(ds.unitaries[i], tol)) {
            throw ValidationError("dataset member " + std::to_string(i) + " is not unitary");
        }
    }
}

Mat bloch_prep(double x, double y, double z) {
    const double theta = std::acos(std::clamp(z, -1.0, 1.0));
    const double phi = std::atan2(y, x);
    return p1_matrix(theta, phi, 0.0);
}

}  // namespace

Dataset gen_haar_unitaries(int n_qubits, int size, RngHandle& rng) {
    if (size < 1) throw std::invalid_argument("gen_haar_unitaries: size must be >= 1");
    if (n_qubits < 1 || n_qubits > 6) throw std::invalid_argument("gen_haar_unitaries: 1..6 qubits supported");
    Dataset ds;
    ds.n_qubits = n_qubits;
    ds.kind = DatasetKind::HaarUnitary;
    ds.seed = rng.seed();
    for (int i = 0; i < size; ++i) ds.unitaries.push_back(haar_unitary(1 << n_qubits, rng));
    return ds;
}

Dataset gen_haar_states(int n_qubits, int size, RngHandle& rng) {
    Dataset ds = gen_haar_unitaries(n_qubits, size, rng);
    ds.kind = DatasetKind::HaarState;
    return ds;
}

Dataset gen_golden_equispaced(int size) {
    if (size < 1) throw std::invalid_argument("gen_golden_equispaced: size must be >= 1");
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    Dataset ds;
    ds.n_qubits = 1;
    ds.kind = DatasetKind::GoldenEquispaced;
    for (int i = 0; i < size; ++i) {
        const double theta = std::acos(std::clamp(1.0 - 2.0 * (i + 0.5) / size, -1.0, 1.0));
        const double phi = std::fmod(2.0 * M_PI * i / golden, 2.0 * M_PI);
        ds.unitaries.push_back(p1_matrix(theta, phi, 0.0));
    }
    return ds;
}

Dataset gen_u3_grid(int resolution) {
    if (resolution < 1) throw std::invalid_argument("gen_u3_grid: resolution must be >= 1");
    Dataset ds;
    ds.n_qubits = 1;
    ds.kind = DatasetKind::U3Grid;
    // midpoint convention: resolution 1 emits the domain midpoints
    auto grid = [&](double lo, double hi, int k) { return lo + (hi - lo) * (k + 0.5) / resolution; };
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            for (int k = 0; k < resolution; ++k) {
                ds.unitaries.push_back(p1_matrix(grid(0, M_PI, i), grid(0, 2 * M_PI, j), grid(0, 2 * M_PI, k)));
            }
        }
    }
    return ds;
}

Dataset gen_stab_magic() {
    Dataset ds;
    ds.n_qubits = 1;
    ds.kind = DatasetKind::StabMagic;
    ds.unitaries.push_back(bloch_prep(0, 0, 1));
    ds.unitaries.push_back(bloch_prep(0, 0, -1));
    ds.unitaries.push_back(bloch_prep(1, 0, 0));
    ds.unitaries.push_back(bloch_prep(-1, 0, 0));
    ds.unitaries.push_back(bloch_prep(0, 1, 0));
    ds.unitaries.push_back(bloch_prep(0, -1, 0));
    const double r = 1.0 / std::sqrt(3.0);
    for (const double sx : {1.0, -1.0}) {
        for (const double sy : {1.0, -1.0}) {
            for (const double sz : {1.0, -1.0}) {
                ds.unitaries.push_back(bloch_prep(sx * r, sy * r, sz * r));
            }
        }
    }
    return ds;
}

Dataset gen_weyl_random(int size, RngHandle& rng) {
    if (size < 1) throw std::invalid_argument("gen_weyl_random: size must be >= 1");
    Dataset ds;
    ds.n_qubits = 2;
    ds.kind = DatasetKind::WeylRandom;
    ds.seed = rng.seed();
    for (int i = 0; i < size; ++i) {
        const Eigen::Vector3d t =
            weyl_canonicalize({rng.uniform(), rng.uniform(), rng.uniform()});
        ds.unitaries.push_back(nl2_matrix(t(0), t(1), t(2)));
    }
    return ds;
}

Dataset gen_weyl_equispaced_nonlocal(int size) {
    if (size < 1) throw std::invalid_argument("gen_weyl_equispaced_nonlocal: size must be >= 1");
    // Grid the cube, canonicalize, drop the identity class, deduplicate; grow
    // the grid until enough distinct chamber points exist.
    std::vector<Eigen::Vector3d> pts;
    for (int res = 2; res < 64 && static_cast<int>(pts.size()) < size; ++res) {
        pts.clear();
        for (int i = 0; i < res; ++i) {
            for (int j = 0; j < res; ++j) {
                for (int k = 0; k < res; ++k) {
                    const Eigen::Vector3d t = weyl_canonicalize(
                        {(i + 0.5) / res, (j + 0.5) / res, (k + 0.5) / res});
                    if (t.norm() < 1e-9) continue;  // identity class is not non-local
                    bool dup = false;
                    for (const auto& p : pts) {
                        if ((p - t).norm() < 1e-9) { dup = true; break; }
                    }
                    if (!dup) pts.push_back(t);
                }
            }
        }
    }
    if (static_cast<int>(pts.size()) < size) {
        throw std::invalid_argument("gen_weyl_equispaced_nonlocal: requested size too large");
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });
    // greedy farthest-point trim to exactly `size`, seeded at the lex-smallest
    std::vector<Eigen::Vector3d> chosen{pts.front()};
    std::vector<bool> used(pts.size(), false);
    used[0] = true;
    while (static_cast<int>(chosen.size()) < size) {
        int best = -1;
        double best_min = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& c : chosen) dmin = std::min(dmin, (pts[i] - c).norm());
            if (dmin > best_min + 1e-15) {
                best_min = dmin;
                best = static_cast<int>(i);
            }
        }
        used[best] = true;
        chosen.push_back(pts[best]);
    }
    Dataset ds;
    ds.n_qubits = 2;
    ds.kind = DatasetKind::WeylEquispacedNonlocal;
    for (const auto& t : chosen) ds.unitaries.push_back(nl2_matrix(t(0), t(1), t(2)));
    return ds;
}

Dataset load_dataset(const std::vector<std::string>& paths, int n_qubits) {
    if (paths.empty()) throw std::invalid_argument("load_dataset: no files given");
    Dataset ds;
    ds.n_qubits = n_qubits;
    ds.kind = DatasetKind::FromFiles;
    ds.source_paths = paths;
    const int want = 1 << n_qubits;
    for (const auto& path : paths) {
        Mat u = load_matrix(path);
        if (u.rows() != want) {
            throw ValidationError(path + ": dimension " + std::to_string(u.rows()) +
                                  " does not match the dataset's " + std::to_string(want));
        }
        if (!is_unitary(u, 1e-8)) {
            throw ValidationError(path + ": matrix is not unitary");
        }
        ds.unitaries.push_back(std::move(u));
    }
    validate_members(ds, 1e-8);
    return ds;
}

std::string export_coords(const Dataset& ds) {
    std::ostringstream out;
    char buf[128];
    if (ds.n_qubits == 1) {
        out << "index,x,y,z\n";
        for (int i = 0; i < ds.size(); ++i) {
            const Eigen::Vector2cd psi = ds.unitaries[i].col(0);
            const cplx a = psi(0), b = psi(1);
            const double x = 2.0 * (std::conj(a) * b).real();
            const double y = 2.0 * (std::conj(a) * b).imag();
            const double z = std::norm(a) - std::norm(b);
            std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n", i, x, y, z);
            out << buf;
        }
    } else if (ds.n_qubits == 2) {
        out << "index,tx,ty,tz\n";
        for (int i = 0; i < ds.size(); ++i) {
            const CanonicalForm cf = kak_canonicalize(ds.unitaries[i]);
            std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n", i, cf.t(0), cf.t(1), cf.t(2));
            out << buf;
        }
    } else {
        throw std::invalid_argument("export_coords: only 1- and 2-qubit datasets have plot coordinates");
    }
    return out.str();
}

}  // namespace qf
