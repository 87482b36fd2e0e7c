#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "canonic/symidx.hpp"

namespace canonic::siegel {

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point of the Siegel upper half-space: complex symmetric Z with positive
/// definite imaginary part. Construct through make_period_point, which
/// validates both conditions and caches the spectral data of Im Z.
struct PeriodPoint {
    int g = 0;
    Matrix<Cplx> Z;
    Matrix<double> Y;       // Im Z
    double y_lambda_min = 0;
};

PeriodPoint make_period_point(const Matrix<Cplx>& Z);

struct Characteristic {
    std::vector<double> a, b;
    bool half_integer = false;
};

/// Half-integer characteristic from 0/1 flags (flag 1 means entry 1/2).
Characteristic half_char(const std::vector<int>& a2, const std::vector<int>& b2);

/// Parity factor e = exp(4 pi i a.b) of a half-integer characteristic (+-1).
int parity(const Characteristic& ch);

/// Lattice-sum truncation: Euclidean radius about the critical center with
///   radius^2 = (-ln target_tol) / (pi lambda_min(Y)) + margin,
/// optionally scaled (for convergence experiments). Enumerates the integer
/// bounding box; boxes larger than max_points raise BudgetError.
struct TruncationPolicy {
    double target_tol = 1e-12;
    double margin = 4.0;
    double radius_scale = 1.0;
    std::uint64_t max_points = 50'000'000ull;
    int threads = 1;
};

/// Theta function with characteristics:
///   sum_k exp(pi i (k+a)^T Z (k+a) + 2 pi i (k+a)^T (z+b)),
/// truncated to lattice points within the policy radius of the center
/// -a - Y^{-1} Im(z).
Cplx theta(const std::vector<Cplx>& z, const PeriodPoint& pp, const Characteristic& ch,
           const TruncationPolicy& policy = {});

/// Counts of even and odd half-integer characteristics by direct enumeration.
std::pair<std::uint64_t, std::uint64_t> spin_census(int g);

/// Metric coefficients on the symmetric-matrix coordinates:
///   gS_{ij} = 2 chi_i^{-1} chi_j^{-1} (Y^{-1} Y^{-1})_{ij}
/// with the symmetrized square taken along the n=2 table.
Matrix<double> siegel_gS(const Matrix<double>& Y, const SymIndexTable& t);

struct GXi {
    Matrix<Cplx> matrix;  // N x N hermitian
    Cplx det;
};

/// Pullback of the period-point metric along a coefficient matrix B (N x M):
///   gXi_{ij} = sum_{k,l} gtau_{kl} B_{ik} conj(B_{jl}).
GXi g_Xi(const Matrix<Cplx>& B, const PeriodPoint& tau, const SymIndexTable& t);

struct MinorCoeff {
    std::vector<int> cols;  // increasing 0-based column tuple
    Cplx value;
};

/// N x N minors of the first N rows of X over all increasing column tuples;
/// entries below tol (relative to the largest minor) are dropped.
std::vector<MinorCoeff> dw_minors(const Matrix<Cplx>& X, int N, double tol = 1e-12,
                                  std::uint64_t budget = 1'000'000ull);

}  // namespace canonic::siegel
