#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "canonic/matrix.hpp"

using namespace canonic;

namespace {

Matrix<Fp> random_fp_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            std::uint64_t p) {
    Matrix<Fp> m(rows, cols, Fp(0, p));
    std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = Fp(dist(rng), p);
    return m;
}

// Independent oracle: cofactor expansion along the first column.
template <class F>
F det_cofactor(const Matrix<F>& m) {
    const std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    F acc = field_traits<F>::zero(m(0, 0));
    for (std::size_t i = 0; i < n; ++i) {
        Matrix<F> sub(n - 1, n - 1, field_traits<F>::zero(m(0, 0)));
        std::size_t r = 0;
        for (std::size_t ii = 0; ii < n; ++ii) {
            if (ii == i) continue;
            for (std::size_t jj = 1; jj < n; ++jj) sub(r, jj - 1) = m(ii, jj);
            ++r;
        }
        F term = m(i, 0) * det_cofactor(sub);
        acc += (i % 2 == 0) ? term : -term;
    }
    return acc;
}

}  // namespace

TEST_CASE("Fp arithmetic basics") {
    Fp a = Fp::from_int(-3, 7);
    CHECK(a.value() == 4);
    CHECK((Fp(2, 7).inv().value()) == 4);
    CHECK((Fp(3, 7).inv().value()) == 5);
    CHECK((Fp(5, 7) * Fp(3, 7)).value() == 1);
}

TEST_CASE("det: identity 3x3 is 1") {
    auto id = Matrix<Fp>::identity(3, Fp(0, 7));
    CHECK(det(id) == Fp(1, 7));
    auto idc = Matrix<Cplx>::identity(3, Cplx{});
    CHECK(std::abs(det(idc) - Cplx(1, 0)) < 1e-14);
}

TEST_CASE("det: [[2,1],[1,1]] over F_7 is 1") {
    Matrix<Fp> m(2, 2, Fp(0, 7));
    m(0, 0) = Fp(2, 7); m(0, 1) = Fp(1, 7);
    m(1, 0) = Fp(1, 7); m(1, 1) = Fp(1, 7);
    CHECK(det(m) == Fp(1, 7));
}

TEST_CASE("det: repeated column gives zero") {
    std::mt19937_64 rng(11);
    auto m = random_fp_matrix(rng, 4, 4, 101);
    for (std::size_t i = 0; i < 4; ++i) m(i, 2) = m(i, 0);
    CHECK(det(m).is_zero());
}

TEST_CASE("det multiplicativity and cofactor agreement over F_p") {
    std::mt19937_64 rng(5);
    const std::uint64_t p = Fp::kDefaultModulus;
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 2 + trial % 3;  // up to 4x4
        auto a = random_fp_matrix(rng, n, n, p);
        auto b = random_fp_matrix(rng, n, n, p);
        CHECK(det(a * b) == det(a) * det(b));
        CHECK(det(a) == det_cofactor(a));
    }
}

TEST_CASE("det multiplicativity over complex") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 2 + trial % 4;
        Matrix<Cplx> a(n, n, Cplx{}), b(n, n, Cplx{});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) = Cplx(dist(rng), dist(rng));
                b(i, j) = Cplx(dist(rng), dist(rng));
            }
        Cplx lhs = det(a * b), rhs = det(a) * det(b);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("rank_nullspace: trivial cases") {
    Matrix<Fp> z(2, 3, Fp(0, 7));
    auto rn = rank_nullspace(z);
    CHECK(rn.rank == 0);
    CHECK(rn.nullspace.size() == 3);

    auto id = Matrix<Cplx>::identity(5, Cplx{});
    auto rn2 = rank_nullspace(id, 1e-10);
    CHECK(rn2.rank == 5);
    CHECK(rn2.nullspace.empty());
}

TEST_CASE("rank_nullspace: dependent row stacked on a full-rank block") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1, 1);
    Matrix<Cplx> m(10, 40, Cplx{});
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 40; ++j) m(i, j) = Cplx(dist(rng), dist(rng));
    // last row = 2*row0 - row3
    for (std::size_t j = 0; j < 40; ++j) m(9, j) = 2.0 * m(0, j) - m(3, j);
    auto rn = rank_nullspace(m, 1e-10);
    CHECK(rn.rank == 9);
    CHECK(rn.nullspace.size() == 31);
    // residual bound on every nullspace vector
    for (const auto& v : rn.nullspace) {
        double vnorm = 0, rmax = 0;
        for (const auto& x : v) vnorm += std::norm(x);
        vnorm = std::sqrt(vnorm);
        for (std::size_t i = 0; i < 10; ++i) {
            Cplx acc{};
            for (std::size_t j = 0; j < 40; ++j) acc += m(i, j) * v[j];
            rmax = std::max(rmax, std::abs(acc));
        }
        CHECK(rmax <= 1e-10 * m.max_weight() * vnorm * 40);
    }
}

TEST_CASE("rank + nullity = cols (random shapes, F_p)") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t r = 1 + trial % 5, c = 1 + (trial * 7) % 8;
        auto m = random_fp_matrix(rng, r, c, 10007);
        auto rn = rank_nullspace(m);
        CHECK(rn.rank + rn.nullspace.size() == c);
        for (const auto& v : rn.nullspace)
            for (std::size_t i = 0; i < r; ++i) {
                Fp acc(0, 10007);
                for (std::size_t j = 0; j < c; ++j) acc += m(i, j) * v[j];
                CHECK(acc.is_zero());
            }
    }
}

TEST_CASE("inverse: diag(2,3) over F_7 is diag(4,5)") {
    Matrix<Fp> m(2, 2, Fp(0, 7));
    m(0, 0) = Fp(2, 7);
    m(1, 1) = Fp(3, 7);
    auto inv = inverse(m);
    CHECK(inv(0, 0) == Fp(4, 7));
    CHECK(inv(1, 1) == Fp(5, 7));
    CHECK(inv(0, 1).is_zero());
}

TEST_CASE("inverse: Hilbert 3x3 in complex") {
    Matrix<Cplx> h(3, 3, Cplx{});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h(i, j) = 1.0 / (i + j + 1);
    auto prod = h * inverse(h, 1e-14);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("inverse: singular matrix raises") {
    Matrix<Fp> m(2, 2, Fp(0, 7));
    m(0, 0) = Fp(1, 7); m(0, 1) = Fp(2, 7);
    m(1, 0) = Fp(2, 7); m(1, 1) = Fp(4, 7);
    CHECK_THROWS_AS(inverse(m), SingularMatrixError);
}

TEST_CASE("rational field det via Bareiss stays exact") {
    Matrix<Rational> m(3, 3, Rational(0));
    int vals[3][3] = {{2, -1, 3}, {4, 2, 1}, {-2, 5, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = Rational(vals[i][j]);
    CHECK(det(m) == det_cofactor(m));
}
