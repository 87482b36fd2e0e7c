#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "canonic/combdet.hpp"

using namespace canonic;
using namespace canonic::combdet;

namespace {

const std::uint64_t P = Fp::kDefaultModulus;

Matrix<Fp> random_samples(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_int_distribution<std::uint64_t> dist(0, P - 1);
    Matrix<Fp> m(rows, cols, Fp(0, P));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Fp(dist(rng), P);
    return m;
}

/// Conditioning-point samples with f_i(p_j) = delta_ij for all i (the full
/// g(g-n) conditions).
Matrix<Fp> full_delta(int g, int n) {
    Matrix<Fp> fp(g, g - n, Fp(0, P));
    for (int c = 0; c < g - n; ++c) fp(n + c, c) = Fp(1, P);
    return fp;
}

/// Weaker variant: delta_ij only for i <= j, random below the diagonal.
/// Sufficient for the initial-segment identity (the conditioning columns are
/// consumed bottom-up), but not once a conditioning point is omitted.
Matrix<Fp> delta_conditioned(std::mt19937_64& rng, int g, int n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, P - 1);
    Matrix<Fp> fp(g, g - n, Fp(0, P));
    for (int c = 0; c < g - n; ++c) {
        int j = n + 1 + c;  // this column is the point p_j
        for (int i = 1; i <= g; ++i) {
            if (i < j) fp(i - 1, c) = Fp(0, P);
            else if (i == j) fp(i - 1, c) = Fp(1, P);
            else fp(i - 1, c) = Fp(dist(rng), P);
        }
    }
    return fp;
}

Fp int_elem(long long v) { return Fp::from_int(v, P); }

}  // namespace

TEST_CASE("m-index: ordered-set requirement") {
    PairScheme s3(3);
    CHECK(s3.flat(1, 1) == 1);
    CHECK(s3.flat(1, 2) == 2);
    CHECK(s3.flat(1, 3) == 3);
    CHECK(s3.flat(2, 2) == 4);
    CHECK(s3.flat(2, 3) == 5);
    CHECK(s3.flat(3, 3) == 6);
    PairScheme s4(4);
    CHECK(s4.flat(4, 4) == 10);
    for (int g = 2; g <= 6; ++g) {
        PairScheme s(g);
        for (int i = 1; i <= g; ++i)
            for (int j = 1; j <= g; ++j) CHECK(s.flat(i, j) == s.flat(j, i));
        // first L(n) values under min <= n enumerate 1..L in order
        int next = 1;
        for (int i = 1; i <= g; ++i)
            for (int j = i; j <= g; ++j) CHECK(s.flat(i, j) == next++);
        for (int l = 1; l <= s.M; ++l) {
            auto [i, j] = s.pair_of(l);
            CHECK(s.flat(i, j) == l);
        }
    }
}

TEST_CASE("d-tuples: g=2 identity assignment") {
    PairScheme s(2);
    // d^1 = (1,2), d^2 = (1,3), d^3 = (2,3) under s = id
    CHECK(s.tuple_pair(1, 1) == 1);
    CHECK(s.tuple_pair(1, 2) == 2);
    CHECK(s.tuple_pair(2, 1) == 1);
    CHECK(s.tuple_pair(2, 2) == 3);
    CHECK(s.tuple_pair(3, 1) == 2);
    CHECK(s.tuple_pair(3, 2) == 3);
}

TEST_CASE("d-tuples: every flat index lies in exactly two tuples") {
    for (int g = 2; g <= 5; ++g) {
        PairScheme s(g);
        std::vector<int> count(s.M + 1, 0);
        for (int k = 1; k <= g + 1; ++k)
            for (int a = 1; a <= g; ++a) ++count[s.tuple_pair(k, a)];
        for (int l = 1; l <= s.M; ++l) CHECK(count[l] == 2);
    }
}

TEST_CASE("constants: c_{g,1} = g!") {
    long long fact = 1;
    for (int g = 2; g <= 6; ++g) {
        fact = 1;
        for (int i = 2; i <= g; ++i) fact *= i;
        CHECK(constant(g, 1, ConstantKind::c_gn) == fact);
    }
}

TEST_CASE("constants: c_{g,2} = g!(g-1)!(2g-1)") {
    for (int g = 2; g <= 5; ++g) {
        long long fg = 1, fg1 = 1;
        for (int i = 2; i <= g; ++i) fg *= i;
        for (int i = 2; i <= g - 1; ++i) fg1 *= i;
        CHECK(constant(g, 2, ConstantKind::c_gn) == fg * fg1 * (2 * g - 1));
    }
}

TEST_CASE("constants: c_2 = 6, c_3 = 360") {
    CHECK(constant(2, 2, ConstantKind::c_g) == 6);
    CHECK(constant(3, 3, ConstantKind::c_g) == 360);
}

TEST_CASE("constants: budget guard reports enumeration size") {
    CHECK_THROWS_AS(constant(5, 5, ConstantKind::c_g, 1000), BudgetExceeded);
    try {
        constant(4, 2, ConstantKind::c_prime_gn, 10);
    } catch (const BudgetExceeded& e) {
        CHECK(e.count == 41472ull);  // 24^2 * 6^2 * 2
    }
}

TEST_CASE("unconditioned lemma, g=2: c_2 det ff = perm sum; product form") {
    std::mt19937_64 rng(101);
    PairScheme sch(2);
    SumPlan plan;
    std::vector<int> I = {1, 2, 3}, pts = {0, 1, 2};
    for (int trial = 0; trial < 20; ++trial) {
        auto f = random_samples(rng, 2, 3);
        Fp lhs = lhs_det(f, sch, I, pts);
        auto rhs = rhs_unconditioned(f, plan);
        CHECK(rhs.value == int_elem(6) * lhs);
        // g=2 closed form: det ff = det f(x1,x2) det f(x1,x3) det f(x2,x3)
        auto det2 = [&](int a, int b) {
            return f(0, a) * f(1, b) - f(0, b) * f(1, a);
        };
        CHECK(lhs == det2(0, 1) * det2(0, 2) * det2(1, 2));
    }
}

TEST_CASE("unconditioned lemma, g=3: c_3 det ff = 720-perm sum") {
    std::mt19937_64 rng(202);
    PairScheme sch(3);
    SumPlan plan;
    std::vector<int> I, pts;
    for (int l = 1; l <= 6; ++l) { I.push_back(l); pts.push_back(l - 1); }
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_samples(rng, 3, 6);
        CHECK(rhs_unconditioned(f, plan).value == int_elem(360) * lhs_det(f, sch, I, pts));
    }
}

TEST_CASE("reduced P'_M mode matches Full exactly, g = 2, 3") {
    std::mt19937_64 rng(303);
    for (int g = 2; g <= 3; ++g)
        for (int trial = 0; trial < 3; ++trial) {
            auto f = random_samples(rng, g, g * (g + 1) / 2);
            SumPlan full_plan, red_plan;
            red_plan.mode = SumPlan::Mode::ReducedPrimeM;
            CHECK(rhs_unconditioned(f, full_plan).value == rhs_unconditioned(f, red_plan).value);
        }
}

TEST_CASE("lhs_det: repeated point gives zero") {
    std::mt19937_64 rng(7);
    auto f = random_samples(rng, 2, 3);
    PairScheme sch(2);
    CHECK(lhs_det(f, sch, {1, 2, 3}, {0, 1, 1}).is_zero());
}

TEST_CASE("conditioned lemma n=2, g=4 and g=5, exact") {
    std::mt19937_64 rng(404);
    for (int g = 4; g <= 5; ++g) {
        PairScheme sch(g);
        const int n = 2, L = sch.L(n);
        long long c = constant(g, n, ConstantKind::c_gn);
        std::vector<int> I, pts;
        for (int l = 1; l <= L; ++l) { I.push_back(l); pts.push_back(l - 1); }
        SumPlan plan;
        plan.max_perms = 400000;
        for (int trial = 0; trial < 3; ++trial) {
            // synthetic functions: random at x-points, delta-pattern at p-points
            auto fx = random_samples(rng, g, L);
            auto fp = delta_conditioned(rng, g, n);
            Matrix<Fp> f(g, L, Fp(0, P));
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < L; ++j) f(i, j) = fx(i, j);
            Fp lhs = lhs_det(f, sch, I, pts);
            auto rhs = rhs_conditioned(fx, fp, n, plan);
            CHECK(rhs.value == int_elem(c) * lhs);
        }
    }
}

TEST_CASE("conditioned lemma with n=g reduces to the unconditioned sum") {
    std::mt19937_64 rng(505);
    auto f = random_samples(rng, 3, 6);
    SumPlan plan;
    Matrix<Fp> empty(3, 0, Fp(0, P));
    CHECK(rhs_conditioned(f, empty, 3, plan).value == rhs_unconditioned(f, plan).value);
}

TEST_CASE("extended lemma n=2, g=4: c'_{4,2} from enumeration closes the identity") {
    std::mt19937_64 rng(606);
    const int g = 4, n = 2;
    PairScheme sch(g);
    const int L = sch.L(n);
    long long cp = constant(g, n, ConstantKind::c_prime_gn, 100000, {3, 4});
    CHECK(cp != 0);
    std::vector<int> I, pts;
    for (int l = 1; l <= L; ++l) I.push_back(l);
    I.push_back(sch.flat(3, 4));
    for (int l = 0; l <= L; ++l) pts.push_back(l);
    SumPlan plan;
    plan.max_perms = 50000;
    auto fp = full_delta(g, n);
    for (int trial = 0; trial < 3; ++trial) {
        auto fx = random_samples(rng, g, L + 1);
        Fp lhs = lhs_det(fx, sch, I, pts);
        auto rhs = rhs_extended(fx, fp, n, {3, 4}, plan);
        CHECK(rhs.value == int_elem(cp) * lhs);
    }
}

TEST_CASE("extended lemma: repeated sample point kills both sides") {
    std::mt19937_64 rng(707);
    const int g = 4, n = 2;
    PairScheme sch(g);
    auto fx = random_samples(rng, g, sch.L(n) + 1);
    for (int i = 0; i < g; ++i) fx(i, 1) = fx(i, 0);
    auto fp = delta_conditioned(rng, g, n);
    SumPlan plan;
    plan.max_perms = 50000;
    std::vector<int> I, pts;
    for (int l = 1; l <= sch.L(n); ++l) I.push_back(l);
    I.push_back(sch.flat(3, 4));
    for (int l = 0; l <= sch.L(n); ++l) pts.push_back(l);
    CHECK(lhs_det(fx, sch, I, pts).is_zero());
    CHECK(rhs_extended(fx, fp, n, {3, 4}, plan).value.is_zero());
}

TEST_CASE("theorem main sum: synthetic quadric data vanishes exactly, random does not") {
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<std::uint64_t> dist(1, P - 1);
    const int g = 4;
    // Quadric X3 X4 = c12 X1X2 + c13 X1X3 + c14 X1X4 + c23 X2X3 + c24 X2X4,
    // so the product functions satisfy one relation avoiding the squares.
    Fp c12 = Fp(dist(rng), P), c13 = Fp(dist(rng), P), c14 = Fp(dist(rng), P),
       c23 = Fp(dist(rng), P), c24 = Fp(dist(rng), P);
    auto on_quadric = [&](Fp x1, Fp x2, Fp x3) {
        Fp denom = x3 - c14 * x1 - c24 * x2;
        Fp num = c12 * x1 * x2 + c13 * x1 * x3 + c23 * x2 * x3;
        return num / denom;  // x4
    };
    Matrix<Fp> omega(g, 2 * g, Fp(0, P));
    for (int c = 0; c < 2 * g; ++c) {
        Fp x1 = Fp(dist(rng), P), x2 = Fp(dist(rng), P), x3 = Fp(dist(rng), P);
        omega(0, c) = x1; omega(1, c) = x2; omega(2, c) = x3;
        omega(3, c) = on_quadric(x1, x2, x3);
    }
    // p3 = (0,0,1,0) and p4 = (0,0,0,1) lie on the quadric and are
    // delta-normalized.
    Matrix<Fp> pm(g, 2, Fp(0, P));
    pm(2, 0) = Fp(1, P);
    pm(3, 1) = Fp(1, P);
    SumPlan plan;
    plan.max_perms = 50000;
    CHECK(theorem_main_sum(omega, pm, {3, 4}, plan).value.is_zero());

    // negative control: perturb one sample off the quadric
    omega(3, 0) += Fp(1, P);
    CHECK_FALSE(theorem_main_sum(omega, pm, {3, 4}, plan).value.is_zero());
}

TEST_CASE("theorem main sum matches the extended lemma up to a fixed sign") {
    // Both are sums over all assignments of the same eight points; the slot
    // layouts differ by a fixed relabeling, so the values agree up to sign.
    std::mt19937_64 rng(909);
    const int g = 4, n = 2;
    PairScheme sch(g);
    SumPlan plan;
    plan.max_perms = 50000;
    int agree = 0, flip = 0;
    for (int trial = 0; trial < 3; ++trial) {
        auto fx = random_samples(rng, g, sch.L(n) + 1);
        auto fp = delta_conditioned(rng, g, n);
        Fp a = theorem_main_sum(fx, fp, {3, 4}, plan).value;
        Fp b = rhs_extended(fx, fp, n, {3, 4}, plan).value;
        if (a == b) ++agree;
        if (a == -b) ++flip;
    }
    CHECK(agree + flip == 3);
    CHECK((agree == 3 || flip == 3));
}

TEST_CASE("permutation sum is deterministic across thread counts (exact)") {
    std::mt19937_64 rng(111);
    auto f = random_samples(rng, 3, 6);
    SumPlan p1, p4;
    p4.threads = 4;
    CHECK(rhs_unconditioned(f, p1).value == rhs_unconditioned(f, p4).value);
}

TEST_CASE("det cache: cached lookups agree with fresh computation") {
    std::mt19937_64 rng(222);
    auto f = random_samples(rng, 4, 10);
    DetCache<Fp> cache(f, Matrix<Fp>(4, 0, Fp(0, P)), 4);
    cache.prefill(10);
    std::uniform_int_distribution<int> idx(0, 9);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<int> cols = {idx(rng), idx(rng), idx(rng), idx(rng)};
        CHECK(cache.get(cols) == cache.compute(cols));
    }
}
