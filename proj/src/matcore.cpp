#include "qforge/matcore.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace qf {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace

RngHandle::RngHandle(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
        s = splitmix64(s);
        w = s;
    }
}

std::uint64_t RngHandle::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngHandle::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngHandle::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngHandle::uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    // rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double RngHandle::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * f;
    has_cached_normal_ = true;
    return u * f;
}

RngHandle RngHandle::child(std::uint64_t index) const {
    return RngHandle(splitmix64(seed_ ^ splitmix64(0x9E3779B97F4A7C15ull * (index + 1))));
}

bool is_unitary(const Mat& u, double tol) {
    if (u.rows() != u.cols() || u.rows() == 0) return false;
    Mat g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff() < tol;
}

void require_unitary(const Mat& u, double tol, const std::string& what) {
    if (!is_unitary(u, tol)) {
        throw ValidationError(what + ": matrix is not unitary within tolerance " + std::to_string(tol));
    }
}

bool is_power_of_two(int n) {
    return n >= 1 && (n & (n - 1)) == 0;
}

Mat haar_unitary(int dim, RngHandle& rng) {
    if (dim < 1) throw std::invalid_argument("haar_unitary: dim must be >= 1");
    Mat g(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            g(i, j) = cplx(re, im);
        }
    }
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(dim, dim);
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Normalize R's diagonal to unit modulus so the distribution is Haar, not
    // QR-biased (Mezzadri's correction).
    for (int j = 0; j < dim; ++j) {
        cplx d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0) ? d / a : cplx(1, 0);
    }
    return q;
}

double process_fidelity(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("process_fidelity: dimension mismatch");
    }
    const double d = static_cast<double>(a.rows());
    const cplx tr = (a.adjoint() * b).trace();
    return std::norm(tr) / (d * d);
}

double spectral_norm(const Mat& m) {
    if (m.rows() == 2 && m.cols() == 2) {
        // largest eigenvalue of the 2x2 Gram matrix; the discriminant is a sum
        // of squares, so this stays accurate when singular values coincide
        const double p = std::norm(m(0, 0)) + std::norm(m(1, 0));
        const double q = std::norm(m(0, 1)) + std::norm(m(1, 1));
        const cplx r = std::conj(m(0, 0)) * m(0, 1) + std::conj(m(1, 0)) * m(1, 1);
        const double half_diff = 0.5 * (p - q);
        const double lam = 0.5 * (p + q) + std::sqrt(half_diff * half_diff + std::norm(r));
        return std::sqrt(std::max(lam, 0.0));
    }
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double operator_distance(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("operator_distance: dimension mismatch");
    }
    const cplx tr = (a.adjoint() * b).trace();
    const double atr = std::abs(tr);
    if (atr > 1e-12) {
        return spectral_norm(a - b * (atr / tr));
    }
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 360; ++k) {
        const double phi = 2.0 * M_PI * k / 360.0;
        best = std::min(best, spectral_norm(a - b * std::polar(1.0, phi)));
    }
    return best;
}

Mat kron(const Mat& a, const Mat& b) {
    return Eigen::kroneckerProduct(a, b);
}

namespace {

// Simultaneously diagonalize two commuting real symmetric matrices over a real
// orthonormal basis: eigenspaces of A are re-diagonalized against B.
bool simdiag_real_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd& q) {
    const int n = static_cast<int>(a.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esa(a);
    if (esa.info() != Eigen::Success) return false;
    q = esa.eigenvectors();
    const Eigen::VectorXd wa = esa.eigenvalues();
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && std::abs(wa(j + 1) - wa(i)) < 1e-7) ++j;
        if (j > i) {
            const int m = j - i + 1;
            const Eigen::MatrixXd blk = q.middleCols(i, m);
            Eigen::MatrixXd bp = blk.transpose() * b * blk;
            bp = 0.5 * (bp + bp.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esb(bp);
            if (esb.info() != Eigen::Success) return false;
            q.middleCols(i, m) = blk * esb.eigenvectors();
        }
        i = j + 1;
    }
    return true;
}

}  // namespace

void eig_unitary_symmetric(const Mat& m, RMat& q, Vec& d) {
    const int n = static_cast<int>(m.rows());
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_unitary_symmetric: matrix must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
        throw std::invalid_argument("eig_unitary_symmetric: matrix is not symmetric");
    }
    if (!is_unitary(m, 1e-8)) {
        throw std::invalid_argument("eig_unitary_symmetric: matrix is not unitary");
    }
    const Eigen::MatrixXd a = m.real();
    const Eigen::MatrixXd b = m.imag();

    auto verify = [&](const Eigen::MatrixXd& qq) {
        Vec dd(n);
        for (int k = 0; k < n; ++k) {
            dd(k) = qq.col(k).cast<cplx>().dot(m * qq.col(k).cast<cplx>());
        }
        Mat rec = qq.cast<cplx>() * dd.asDiagonal() * qq.transpose().cast<cplx>();
        if ((rec - m).cwiseAbs().maxCoeff() < 1e-9) {
            d = dd;
            return true;
        }
        return false;
    };

    if (simdiag_real_pair(a, b, q) && verify(q)) {
        if (q.determinant() < 0) {
            q.col(0) *= -1.0;
        }
        return;
    }
    // Deterministic random-mix retries: diagonalize alpha*A + beta*B and check.
    RngHandle rng(0x51D1A60Full);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double alpha = rng.normal();
        const double beta = rng.normal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(alpha * a + beta * b);
        if (es.info() != Eigen::Success) continue;
        q = es.eigenvectors();
        if (verify(q)) {
            if (q.determinant() < 0) q.col(0) *= -1.0;
            return;
        }
    }
    throw ValidationError("eig_unitary_symmetric: failed to diagonalize input");
}

namespace {

cplx parse_complex_entry(const std::string& tok, const std::string& path) {
    // accepted: "re+imj", "re-imj", bare "re"
    if (tok.empty()) throw IoError(path + ": empty matrix entry");
    std::string s = tok;
    bool has_j = false;
    if (s.back() == 'j' || s.back() == 'J') {
        has_j = true;
        s.pop_back();
    }
    if (!has_j) {
        try {
            size_t pos = 0;
            const double re = std::stod(s, &pos);
            if (pos == s.size()) return cplx(re, 0.0);
        } catch (...) {
        }
        throw IoError(path + ": cannot parse matrix entry '" + tok + "'");
    }
    // find the sign splitting real and imaginary parts (skip a leading sign and
    // exponent signs)
    for (size_t i = s.size(); i-- > 1;) {
        const char c = s[i];
        if ((c == '+' || c == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            try {
                size_t p1 = 0, p2 = 0;
                const std::string re_s = s.substr(0, i);
                std::string im_s = s.substr(i);
                if (im_s == "+" || im_s == "-") im_s += "1";
                const double re = std::stod(re_s, &p1);
                const double im = std::stod(im_s, &p2);
                if (p1 == re_s.size() && p2 == im_s.size()) return cplx(re, im);
            } catch (...) {
            }
            break;
        }
    }
    // pure imaginary "imj"
    try {
        size_t pos = 0;
        const double im = std::stod(s, &pos);
        if (pos == s.size()) return cplx(0.0, im);
    } catch (...) {
    }
    throw IoError(path + ": cannot parse matrix entry '" + tok + "'");
}

}  // namespace

Mat load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open file");
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, "UMAT", 4) == 0) {
        std::uint32_t dim = 0;
        in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
        if (!in || dim == 0 || dim > 4096) throw IoError(path + ": bad binary matrix header");
        Mat u(dim, dim);
        for (std::uint32_t i = 0; i < dim; ++i) {
            for (std::uint32_t j = 0; j < dim; ++j) {
                double re = 0, im = 0;
                in.read(reinterpret_cast<char*>(&re), sizeof(re));
                in.read(reinterpret_cast<char*>(&im), sizeof(im));
                if (!in) throw IoError(path + ": truncated binary matrix");
                u(i, j) = cplx(re, im);
            }
        }
        return u;
    }
    in.clear();
    in.seekg(0);
    std::string word;
    in >> word;
    if (word != "dim") throw IoError(path + ": expected 'dim <d>' header");
    int dim = 0;
    in >> dim;
    if (!in || dim <= 0 || dim > 4096) throw IoError(path + ": bad matrix dimension");
    Mat u(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            if (!(in >> word)) throw IoError(path + ": truncated matrix body");
            u(i, j) = parse_complex_entry(word, path);
        }
    }
    return u;
}

void save_matrix_text(const Mat& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open file for writing");
    out << "dim " << u.rows() << "\n";
    char buf[80];
    for (int i = 0; i < u.rows(); ++i) {
        for (int j = 0; j < u.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", u(i, j).real(), u(i, j).imag());
            out << buf << (j + 1 < u.cols() ? " " : "");
        }
        out << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

void save_matrix_binary(const Mat& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open file for writing");
    out.write("UMAT", 4);
    const std::uint32_t dim = static_cast<std::uint32_t>(u.rows());
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (int i = 0; i < u.rows(); ++i) {
        for (int j = 0; j < u.cols(); ++j) {
            const double re = u(i, j).real();
            const double im = u(i, j).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(re));
            out.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace qf
