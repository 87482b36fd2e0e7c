#include "canonic/siegel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace canonic::siegel {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

}  // namespace

PeriodPoint make_period_point(const Matrix<Cplx>& Z) {
    if (Z.rows() != Z.cols() || Z.rows() == 0)
        throw std::invalid_argument("period point: Z must be square");
    const int g = static_cast<int>(Z.rows());
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            if (std::abs(Z(i, j) - Z(j, i)) > 1e-14 * (1.0 + std::abs(Z(i, j))))
                throw std::invalid_argument("period point: Z not symmetric");
    PeriodPoint pp;
    pp.g = g;
    pp.Z = Z;
    pp.Y = Matrix<double>(g, g, 0.0);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) pp.Y(i, j) = Z(i, j).imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(pp.Y));
    pp.y_lambda_min = es.eigenvalues().minCoeff();
    if (pp.y_lambda_min <= 0)
        throw std::invalid_argument("period point: Im Z not positive definite");
    return pp;
}

Characteristic half_char(const std::vector<int>& a2, const std::vector<int>& b2) {
    if (a2.size() != b2.size()) throw std::invalid_argument("characteristic: size mismatch");
    Characteristic ch;
    ch.half_integer = true;
    for (std::size_t i = 0; i < a2.size(); ++i) {
        if ((a2[i] != 0 && a2[i] != 1) || (b2[i] != 0 && b2[i] != 1))
            throw std::invalid_argument("characteristic: flags must be 0 or 1");
        ch.a.push_back(a2[i] * 0.5);
        ch.b.push_back(b2[i] * 0.5);
    }
    return ch;
}

int parity(const Characteristic& ch) {
    if (!ch.half_integer) throw std::invalid_argument("parity: half-integer only");
    double dot = 0;
    for (std::size_t i = 0; i < ch.a.size(); ++i) dot += ch.a[i] * ch.b[i];
    // exp(4 pi i a.b) with 4 a.b an integer
    long long n = std::llround(4.0 * dot);
    return (n % 2 == 0) ? 1 : -1;
}

Cplx theta(const std::vector<Cplx>& z, const PeriodPoint& pp, const Characteristic& ch,
           const TruncationPolicy& policy) {
    const int g = pp.g;
    if (static_cast<int>(z.size()) != g || static_cast<int>(ch.a.size()) != g ||
        static_cast<int>(ch.b.size()) != g)
        throw std::invalid_argument("theta: dimension mismatch");

    const double r2 =
        (-std::log(policy.target_tol)) / (kPi * pp.y_lambda_min) + policy.margin;
    const double radius = std::sqrt(r2) * policy.radius_scale;

    // center of the Gaussian decay: -a - Y^{-1} Im(z)
    Eigen::VectorXd imz(g);
    for (int i = 0; i < g; ++i) imz(i) = z[i].imag();
    Eigen::VectorXd center = -to_eigen(pp.Y).ldlt().solve(imz);
    for (int i = 0; i < g; ++i) center(i) -= ch.a[i];

    std::vector<long long> lo(g), hi(g);
    std::uint64_t box = 1;
    for (int i = 0; i < g; ++i) {
        lo[i] = static_cast<long long>(std::ceil(center(i) - radius));
        hi[i] = static_cast<long long>(std::floor(center(i) + radius));
        double width = static_cast<double>(hi[i] - lo[i] + 1);
        if (width <= 0) width = 1;
        if (static_cast<double>(box) * width > static_cast<double>(policy.max_points))
            throw BudgetError("theta: lattice enumeration budget exceeded");
        box *= static_cast<std::uint64_t>(width);
    }

    // fixed-order sum over the bounding box, filtered to the ball
    Cplx sum{};
    std::vector<long long> k(g);
    for (int i = 0; i < g; ++i) k[i] = lo[i];
    while (true) {
        double d2 = 0;
        for (int i = 0; i < g; ++i) {
            double d = static_cast<double>(k[i]) - center(i);
            d2 += d * d;
        }
        if (d2 <= radius * radius) {
            // w = k + a; exponent pi i w^T Z w + 2 pi i w^T (z + b)
            Cplx expo{};
            for (int i = 0; i < g; ++i) {
                double wi = static_cast<double>(k[i]) + ch.a[i];
                for (int j = 0; j < g; ++j) {
                    double wj = static_cast<double>(k[j]) + ch.a[j];
                    expo += Cplx(0, kPi) * wi * pp.Z(i, j) * wj;
                }
                expo += Cplx(0, 2 * kPi) * wi * (z[i] + ch.b[i]);
            }
            sum += std::exp(expo);
        }
        int d = g - 1;
        while (d >= 0 && ++k[d] > hi[d]) {
            k[d] = lo[d];
            --d;
        }
        if (d < 0) break;
    }
    return sum;
}

std::pair<std::uint64_t, std::uint64_t> spin_census(int g) {
    if (g < 1 || g > 8) throw std::invalid_argument("spin_census: g must be in 1..8");
    std::uint64_t even = 0, odd = 0;
    for (std::uint64_t code = 0; code < (1ull << (2 * g)); ++code) {
        // low g bits: a flags; high g bits: b flags; odd iff a.b has odd overlap
        std::uint64_t a = code & ((1ull << g) - 1), b = code >> g;
        int bits = 0;
        for (std::uint64_t o = a & b; o; o >>= 1) bits += static_cast<int>(o & 1);
        (bits % 2 == 0 ? even : odd) += 1;
    }
    return {even, odd};
}

Matrix<double> siegel_gS(const Matrix<double>& Y, const SymIndexTable& t) {
    const int g = t.g;
    if (static_cast<int>(Y.rows()) != g || static_cast<int>(Y.cols()) != g || t.n != 2)
        throw std::invalid_argument("siegel_gS: shape/table mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(Y));
    if (es.eigenvalues().minCoeff() <= 0)
        throw std::invalid_argument("siegel_gS: Y not positive definite");
    Matrix<Cplx> yc(g, g, Cplx{});
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) yc(i, j) = Y(i, j);
    auto p = sym_power(inverse(yc, 1e-14), t);
    Matrix<double> out(t.size(), t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            out(i, j) = 2.0 * p(i, j).real() /
                        (static_cast<double>(t.chi[i]) * static_cast<double>(t.chi[j]));
    return out;
}

GXi g_Xi(const Matrix<Cplx>& B, const PeriodPoint& tau, const SymIndexTable& t) {
    const std::size_t M = t.size(), N = B.rows();
    if (B.cols() != M) throw std::invalid_argument("g_Xi: B must have one column per table entry");
    auto gtau = siegel_gS(tau.Y, t);
    GXi out;
    out.matrix = Matrix<Cplx>(N, N, Cplx{});
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            Cplx acc{};
            for (std::size_t k = 0; k < M; ++k)
                for (std::size_t l = 0; l < M; ++l)
                    acc += gtau(k, l) * B(i, k) * std::conj(B(j, l));
            out.matrix(i, j) = acc;
        }
    out.det = det(out.matrix);
    return out;
}

std::vector<MinorCoeff> dw_minors(const Matrix<Cplx>& X, int N, double tol,
                                  std::uint64_t budget) {
    const int M = static_cast<int>(X.cols());
    if (N <= 0 || N > M || static_cast<int>(X.rows()) < N)
        throw std::invalid_argument("dw_minors: invalid subset size");
    if (binomial(static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(N)) > budget)
        throw BudgetError("dw_minors: too many index tuples");

    std::vector<int> rows(N);
    for (int i = 0; i < N; ++i) rows[i] = i;
    std::vector<std::pair<std::vector<int>, Cplx>> all;
    std::vector<int> cols(N);
    for (int i = 0; i < N; ++i) cols[i] = i;
    double scale = 0;
    while (true) {
        Matrix<Cplx> sub(N, N, Cplx{});
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) sub(r, c) = X(rows[r], cols[c]);
        Cplx d = det(sub);
        scale = std::max(scale, std::abs(d));
        all.emplace_back(cols, d);
        int k = N - 1;
        while (k >= 0 && cols[k] == M - N + k) --k;
        if (k < 0) break;
        ++cols[k];
        for (int j = k + 1; j < N; ++j) cols[j] = cols[j - 1] + 1;
    }
    std::vector<MinorCoeff> out;
    for (auto& [c, d] : all)
        if (std::abs(d) > tol * scale) out.push_back({c, d});
    return out;
}

}  // namespace canonic::siegel
