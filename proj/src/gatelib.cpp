#include "qforge/gatelib.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace qf {

namespace {

struct CatalogRow {
    const char* name;
    int arity;
    GateKind kind;
    int param_count;
};

const std::map<GateId, CatalogRow>& catalog() {
    static const std::map<GateId, CatalogRow> rows = {
        {GateId::R1, {"R1", 1, GateKind::RandomFrozen, 0}},
        {GateId::P1, {"P1", 1, GateKind::Parametric, 3}},
        {GateId::T1, {"T1", 1, GateKind::Fixed, 0}},
        {GateId::TD1, {"TD1", 1, GateKind::Fixed, 0}},
        {GateId::S1, {"S1", 1, GateKind::Fixed, 0}},
        {GateId::Z1, {"Z1", 1, GateKind::Fixed, 0}},
        {GateId::X1, {"X1", 1, GateKind::Fixed, 0}},
        {GateId::H1, {"H1", 1, GateKind::Fixed, 0}},
        {GateId::F1, {"F1", 1, GateKind::File, 0}},
        {GateId::R2, {"R2", 2, GateKind::RandomFrozen, 0}},
        {GateId::NL2, {"NL2", 2, GateKind::Parametric, 3}},
        {GateId::CX2, {"CX2", 2, GateKind::Fixed, 0}},
        {GateId::CZ2, {"CZ2", 2, GateKind::Fixed, 0}},
        {GateId::B2, {"B2", 2, GateKind::Fixed, 0}},
        {GateId::SPE2, {"SPE2", 2, GateKind::Parametric, 1}},
        {GateId::F2, {"F2", 2, GateKind::File, 0}},
    };
    return rows;
}

}  // namespace

GateSpec GateSpec::make(GateId id) {
    const CatalogRow& row = catalog().at(id);
    GateSpec s;
    s.id = id;
    s.arity = row.arity;
    s.kind = row.kind;
    s.param_count = row.param_count;
    return s;
}

GateSpec GateSpec::from_name(const std::string& name) {
    for (const auto& [id, row] : catalog()) {
        if (name == row.name) return make(id);
    }
    throw std::invalid_argument("unknown gate identifier '" + name + "'");
}

std::string GateSpec::name() const {
    return catalog().at(id).name;
}

ParamBounds param_bounds(const GateSpec& spec) {
    ParamBounds b;
    switch (spec.id) {
        case GateId::P1:
            // a1 in [0, pi] covers the colatitude once; phases in [0, 2pi)
            b.lo = {0.0, 0.0, 0.0};
            b.hi = {M_PI, 2.0 * M_PI, 2.0 * M_PI};
            break;
        case GateId::NL2:
            b.lo = {0.0, 0.0, 0.0};
            b.hi = {1.0, 1.0, 1.0};
            break;
        case GateId::SPE2:
            b.lo = {0.0};
            b.hi = {0.5};
            break;
        default:
            break;
    }
    return b;
}

Mat p1_matrix(double a1, double a2, double a3) {
    Mat u(2, 2);
    const double c = std::cos(a1 / 2.0);
    const double s = std::sin(a1 / 2.0);
    u(0, 0) = c;
    u(0, 1) = -std::polar(1.0, a3) * s;
    u(1, 0) = std::polar(1.0, a2) * s;
    u(1, 1) = std::polar(1.0, a2 + a3) * c;
    return u;
}

Mat4 magic_gate() {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    Mat4 m;
    m << r, r * i, 0, 0,
         0, 0, r * i, r,
         0, 0, r * i, -r,
         r, -r * i, 0, 0;
    return m;
}

Mat nl2_matrix(double tx, double ty, double tz) {
    // Closed form: NL2 is diagonal in the magic basis with phases
    // exp(-i pi/2 (s . t)), s over the four Bell-sector sign patterns.
    static const double sgn[4][3] = {{1, -1, 1}, {-1, 1, 1}, {1, 1, -1}, {-1, -1, -1}};
    const Mat4 m = magic_gate();
    Vec d(4);
    for (int k = 0; k < 4; ++k) {
        d(k) = std::polar(1.0, -M_PI / 2.0 * (sgn[k][0] * tx + sgn[k][1] * ty + sgn[k][2] * tz));
    }
    return m * d.asDiagonal() * m.adjoint();
}

Mat spe2_matrix(double ty) {
    return nl2_matrix(0.5, ty, 0.0);
}

Mat gate_matrix(const GateSpec& spec, std::span<const double> params, RngHandle& rng) {
    if (static_cast<int>(params.size()) != spec.param_count) {
        throw std::invalid_argument("gate " + spec.name() + ": expected " +
                                    std::to_string(spec.param_count) + " parameters, got " +
                                    std::to_string(params.size()));
    }
    switch (spec.id) {
        case GateId::R1:
            return haar_unitary(2, rng);
        case GateId::R2:
            return haar_unitary(4, rng);
        case GateId::P1:
            return p1_matrix(params[0], params[1], params[2]);
        case GateId::NL2:
            return nl2_matrix(params[0], params[1], params[2]);
        case GateId::SPE2:
            return spe2_matrix(params[0]);
        case GateId::T1:
            return Mat{{cplx(1, 0), 0}, {0, std::polar(1.0, M_PI / 4)}};
        case GateId::TD1:
            return Mat{{cplx(1, 0), 0}, {0, std::polar(1.0, -M_PI / 4)}};
        case GateId::S1:
            return Mat{{cplx(1, 0), 0}, {0, cplx(0, 1)}};
        case GateId::Z1:
            return Mat{{cplx(1, 0), 0}, {0, cplx(-1, 0)}};
        case GateId::X1:
            return Mat{{0, cplx(1, 0)}, {cplx(1, 0), 0}};
        case GateId::H1: {
            const double r = 1.0 / std::sqrt(2.0);
            return Mat{{cplx(r, 0), cplx(r, 0)}, {cplx(r, 0), cplx(-r, 0)}};
        }
        case GateId::CX2: {
            Mat u = Mat::Zero(4, 4);
            u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1;
            return u;
        }
        case GateId::CZ2: {
            Mat u = Mat::Identity(4, 4);
            u(3, 3) = -1;
            return u;
        }
        case GateId::B2: {
            // Berkeley gate exp(i pi/8 (2 XX + YY))
            const double c1 = std::cos(M_PI / 8), s1 = std::sin(M_PI / 8);
            const double c3 = std::cos(3 * M_PI / 8), s3 = std::sin(3 * M_PI / 8);
            const cplx i(0, 1);
            Mat u = Mat::Zero(4, 4);
            u(0, 0) = c1; u(0, 3) = i * s1;
            u(1, 1) = c3; u(1, 2) = i * s3;
            u(2, 1) = i * s3; u(2, 2) = c3;
            u(3, 0) = i * s1; u(3, 3) = c1;
            return u;
        }
        case GateId::F1:
        case GateId::F2: {
            if (spec.file_path.empty()) throw IoError(spec.name() + ": no gate file given");
            Mat u = load_matrix(spec.file_path);
            const int want = spec.id == GateId::F1 ? 2 : 4;
            if (u.rows() != want) {
                throw ValidationError(spec.file_path + ": expected a " + std::to_string(want) +
                                      "x" + std::to_string(want) + " matrix for " + spec.name());
            }
            require_unitary(u, 1e-8, spec.file_path);
            return u;
        }
    }
    throw std::logic_error("unreachable gate id");
}

int GateSet::param_count() const {
    int n = 0;
    for (const auto& s : specs) n += s.param_count;
    return n;
}

std::vector<int> GateSet::one_qubit_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(specs.size()); ++i)
        if (specs[i].arity == 1) out.push_back(i);
    return out;
}

std::vector<int> GateSet::two_qubit_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(specs.size()); ++i)
        if (specs[i].arity == 2) out.push_back(i);
    return out;
}

double GateSet::mean_fab_cost() const {
    if (fab_costs.empty()) return 0.0;
    return std::accumulate(fab_costs.begin(), fab_costs.end(), 0.0) / fab_costs.size();
}

GateSet assemble_gateset(const std::vector<GateSpec>& specs, const std::vector<double>& params,
                         RngHandle& rng, bool include_daggers, const std::string& label) {
    GateSet gs;
    gs.specs = specs;
    gs.params = params;
    gs.include_daggers = include_daggers;
    gs.label = label;
    gs.seed = rng.seed();
    if (static_cast<int>(params.size()) != gs.param_count()) {
        throw std::invalid_argument("gate set '" + label + "': parameter vector length " +
                                    std::to_string(params.size()) + " does not match slot count " +
                                    std::to_string(gs.param_count()));
    }
    std::size_t off = 0;
    for (const auto& spec : specs) {
        std::span<const double> p(params.data() + off, static_cast<std::size_t>(spec.param_count));
        gs.matrices.push_back(gate_matrix(spec, p, rng));
        gs.fab_costs.push_back(spec.fab_cost);
        off += spec.param_count;
    }
    return gs;
}

std::vector<EffectiveGate> effective_one_qubit_gates(const GateSet& gs, bool with_daggers) {
    std::vector<EffectiveGate> out;
    auto push_unique = [&](const std::string& name, const Mat& m, int spec_index, bool dagger) {
        for (const auto& g : out) {
            if (operator_distance(g.matrix, m) < 1e-6) return;
        }
        EffectiveGate g;
        g.name = name;
        g.matrix = m;
        g.arity = 1;
        g.spec_index = spec_index;
        g.is_dagger = dagger;
        out.push_back(std::move(g));
    };
    for (int i = 0; i < static_cast<int>(gs.specs.size()); ++i) {
        if (gs.specs[i].arity != 1) continue;
        push_unique(gs.specs[i].name() + "#" + std::to_string(i), gs.matrices[i], i, false);
    }
    if (with_daggers) {
        const int n_base = static_cast<int>(out.size());
        for (int i = 0; i < n_base; ++i) {
            push_unique(out[i].name + "'", out[i].matrix.adjoint(), out[i].spec_index, true);
        }
    }
    for (auto& g : out) {
        const Mat inv = g.matrix.adjoint();
        g.dagger_index = -1;
        for (int j = 0; j < static_cast<int>(out.size()); ++j) {
            if (operator_distance(out[j].matrix, inv) < 1e-6) {
                g.dagger_index = j;
                break;
            }
        }
    }
    return out;
}

Mat embed_gate(const Mat& g, const std::vector<int>& qubits, int n) {
    const int k = static_cast<int>(qubits.size());
    if (g.rows() != (1 << k)) throw std::invalid_argument("embed_gate: operator size does not match qubit count");
    for (int q : qubits) {
        if (q < 0 || q >= n) throw std::invalid_argument("embed_gate: qubit index out of range");
    }
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (qubits[a] == qubits[b]) throw std::invalid_argument("embed_gate: duplicate qubit index");

    const int dim = 1 << n;
    Mat u = Mat::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        int sub = 0;
        for (int a = 0; a < k; ++a) {
            sub = (sub << 1) | ((col >> (n - 1 - qubits[a])) & 1);
        }
        const int base = [&] {
            int b = col;
            for (int a = 0; a < k; ++a) b &= ~(1 << (n - 1 - qubits[a]));
            return b;
        }();
        for (int sub2 = 0; sub2 < (1 << k); ++sub2) {
            const cplx amp = g(sub2, sub);
            if (amp == cplx(0, 0)) continue;
            int row = base;
            for (int a = 0; a < k; ++a) {
                if ((sub2 >> (k - 1 - a)) & 1) row |= 1 << (n - 1 - qubits[a]);
            }
            u(row, col) += amp;
        }
    }
    return u;
}

Mat circuit_unitary(const Circuit& c, const GateSet& gs) {
    if (!c.gateset_label.empty() && c.gateset_label != gs.label) {
        throw std::invalid_argument("circuit references gate set '" + c.gateset_label +
                                    "' but was evaluated against '" + gs.label + "'");
    }
    const int dim = 1 << c.n_qubits;
    Mat u = Mat::Identity(dim, dim);
    for (const auto& op : c.ops) {
        if (op.gate < 0 || op.gate >= static_cast<int>(gs.matrices.size())) {
            throw std::invalid_argument("circuit op references gate index out of range");
        }
        const Mat g = op.dagger ? Mat(gs.matrices[op.gate].adjoint()) : gs.matrices[op.gate];
        u = embed_gate(g, op.qubits, c.n_qubits) * u;
    }
    return u;
}

int circuit_depth(const Circuit& c) {
    return static_cast<int>(c.ops.size());
}

std::string circuit_to_text(const Circuit& c, const GateSet& gs) {
    std::ostringstream out;
    out << "gateset " << gs.label << "\n";
    out << "qubits " << c.n_qubits << "\n";
    for (const auto& op : c.ops) {
        out << "op " << gs.specs[op.gate].name() << "#" << op.gate << (op.dagger ? "'" : "");
        for (int q : op.qubits) out << " " << q;
        out << "\n";
    }
    return out.str();
}

}  // namespace qf
