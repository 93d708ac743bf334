#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qf {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

// Tolerance layering: one decade of headroom between unitarity checks,
// decomposition reconstruction, and optimizer convergence.
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kDecompTol = 1e-8;
inline constexpr double kOptTol = 1e-6;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic, platform-stable PRNG (xoshiro256++ seeded via splitmix64).
/// Every stochastic operation takes an explicit handle; parallel callers split
/// streams with child(): child_seed = splitmix64(seed ^ splitmix64(golden * (index+1))).
class RngHandle {
  public:
    explicit RngHandle(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();
    /// uniform double in [0, 1)
    double uniform();
    double uniform(double lo, double hi);
    /// uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n);
    /// standard normal (Marsaglia polar; no libstdc++ distribution dependence)
    double normal();
    RngHandle child(std::uint64_t index) const;

  private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

bool is_unitary(const Mat& u, double tol = kUnitaryTol);
void require_unitary(const Mat& u, double tol, const std::string& what);
bool is_power_of_two(int n);

/// Haar-distributed unitary of the given dimension: QR of a complex Ginibre
/// matrix with the R-diagonal phase correction so the measure is exactly Haar.
Mat haar_unitary(int dim, RngHandle& rng);

/// |Tr(a^dag b)|^2 / d^2 — equal to the superoperator-trace form for unitary
/// channels without materializing d^2 x d^2 operators.
double process_fidelity(const Mat& a, const Mat& b);

/// Spectral norm of (a - e^{i phi} b) with phi = arg Tr(a^dag b) when the trace
/// is nonzero, otherwise minimized over a 360-point phase grid.
double operator_distance(const Mat& a, const Mat& b);

double spectral_norm(const Mat& m);

Mat kron(const Mat& a, const Mat& b);

/// Diagonalize a complex symmetric unitary m as m = Q diag(d) Q^T with Q real
/// orthogonal (det +1). Degeneracies are resolved by simultaneously
/// diagonalizing Re(m) and Im(m), re-orthonormalizing within each eigenspace.
void eig_unitary_symmetric(const Mat& m, RMat& q, Vec& d);

// Matrix file formats: UTF-8 text ("dim <d>" then d x d entries "re+imj"),
// or binary ("UMAT" magic, u32 dim, row-major little-endian f64 re/im pairs).
Mat load_matrix(const std::string& path);
void save_matrix_text(const Mat& u, const std::string& path);
void save_matrix_binary(const Mat& u, const std::string& path);

}  // namespace qf
