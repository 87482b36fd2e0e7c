#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "canonic/matrix.hpp"

namespace canonic::combdet {

struct BudgetExceeded : std::runtime_error {
    unsigned long long count;
    explicit BudgetExceeded(unsigned long long c)
        : std::runtime_error("enumeration budget exceeded: " + std::to_string(c) + " tuples"),
          count(c) {}
};

/// Symmetric pair -> flat index surjection in row-major order, so that the
/// pairs with min(i,j) <= n fill the initial segment 1..L for every n.
/// All indices 1-based.
struct PairScheme {
    int g;
    int M;

    explicit PairScheme(int g_) : g(g_), M(g_ * (g_ + 1) / 2) {}

    int flat(int i, int j) const {
        if (i < 1 || j < 1 || i > g || j > g) throw std::out_of_range("pair index out of range");
        if (i > j) std::swap(i, j);
        return M - (g - i + 1) * (g - i + 2) / 2 + (j - i + 1);
    }
    std::pair<int, int> pair_of(int l) const {
        for (int i = 1; i <= g; ++i) {
            int row_end = flat(i, g);
            if (l <= row_end) return {i, i + (l - flat(i, i))};
        }
        throw std::out_of_range("flat index out of range");
    }
    int L(int n) const { return M - (g - n) * (g - n + 1) / 2; }

    /// Flat pair index touched by d-tuple k (1..g+1) at position a (1..g):
    /// pair (a, k-1) for a <= k-1, pair (k, a) for a >= k.
    int tuple_pair(int k, int a) const { return a <= k - 1 ? flat(a, k - 1) : flat(k, a); }
};

// ---------------------------------------------------------------------------
// Combinatorial constants via direct enumeration of the kappa map.
// ---------------------------------------------------------------------------

enum class ConstantKind { c_gn, c_g, c_prime_gn };

namespace detail {

inline int perm_sign(const std::vector<int>& v) {
    int sign = 1;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (v[i] > v[j]) sign = -sign;
    return sign;
}

/// One r-tuple: a bijection of its ordered ground set onto itself,
/// represented by the value vector aligned with the sorted ground.
struct GroundPerm {
    std::vector<int> ground;  // sorted positions (== value set)
    std::vector<int> values;  // current permutation of ground

    int value_at(int pos) const {
        auto it = std::lower_bound(ground.begin(), ground.end(), pos);
        return values[static_cast<std::size_t>(it - ground.begin())];
    }
};

}  // namespace detail

/// Exact integer constants c_{g,n}, c_g = c_{g,g}, and c'_{g,n}, computed by
/// enumerating all tuples of (partial) permutations and accumulating
/// prod sgn(r^k) * sgn(kappa), where sgn of a non-bijective kappa is zero.
/// For c'_{g,n} the extra pair (i,j), n < i,j <= g, defaults to (n+1, n+2).
inline long long constant(int g, int n, ConstantKind kind,
                          unsigned long long max_tuples = 50'000'000ull,
                          std::pair<int, int> extra = {0, 0}) {
    PairScheme sch(g);
    if (kind == ConstantKind::c_g) n = g;
    if (n < 1 || n > g) throw std::invalid_argument("constant: need 1 <= n <= g");

    int ei = extra.first, ej = extra.second;
    if (kind == ConstantKind::c_prime_gn) {
        if (n >= g) throw std::invalid_argument("c'_{g,n} requires n < g");
        if (ei == 0) { ei = n + 1; ej = n + 2; }
        if (ei > ej) std::swap(ei, ej);
        if (!(n < ei && ei < ej && ej <= g) && !(n < ei && ei <= ej && ej <= g))
            throw std::invalid_argument("c'_{g,n}: invalid extra pair");
    }

    // Ground set of tuple k: full I_g for k <= n; I_n for k > n, enlarged by
    // the extra position for the two tuples touching the extra pair.
    std::vector<detail::GroundPerm> perms(g + 1);
    unsigned long long total = 1;
    for (int k = 1; k <= g + 1; ++k) {
        std::vector<int> ground;
        if (k <= n) {
            for (int a = 1; a <= g; ++a) ground.push_back(a);
        } else {
            for (int a = 1; a <= n; ++a) ground.push_back(a);
            if (kind == ConstantKind::c_prime_gn) {
                if (k == ei) ground.push_back(ej);
                if (k == ej + 1) ground.push_back(ei);
            }
        }
        std::sort(ground.begin(), ground.end());
        unsigned long long fact = 1;
        for (std::size_t i = 2; i <= ground.size(); ++i) fact *= i;
        total *= fact;
        perms[k - 1].ground = ground;
        perms[k - 1].values = ground;
    }
    if (total > max_tuples) throw BudgetExceeded(total);

    // Ordered index set the kappa map permutes.
    std::vector<int> index_set;
    for (int l = 1; l <= sch.L(n); ++l) index_set.push_back(l);
    if (kind == ConstantKind::c_prime_gn) index_set.push_back(sch.flat(ei, ej));

    std::vector<std::pair<int, int>> index_pairs;
    for (int l : index_set) index_pairs.push_back(sch.pair_of(l));

    // position of each flat index inside the ordered index set (-1 if absent)
    std::vector<int> pos_of(sch.M + 1, -1);
    for (std::size_t q = 0; q < index_set.size(); ++q) pos_of[index_set[q]] = static_cast<int>(q);

    long long acc = 0;
    std::vector<int> image(index_set.size());
    std::vector<bool> seen(index_set.size());

    // odometer over the permutation tuples
    std::vector<bool> done(g + 1, false);
    while (true) {
        int sign_prod = 1;
        for (auto& p : perms) sign_prod *= detail::perm_sign(p.values);

        bool ok = true;
        std::fill(seen.begin(), seen.end(), false);
        for (std::size_t q = 0; q < index_pairs.size() && ok; ++q) {
            auto [i, j] = index_pairs[q];
            int vi = perms[i - 1].value_at(j);        // r^i_j
            int vj = perms[j].value_at(i);            // r^{j+1}_i
            int l = sch.flat(vi, vj);
            int p = pos_of[l];
            if (p < 0 || seen[p]) { ok = false; break; }
            seen[p] = true;
            image[q] = p;
        }
        if (ok) {
            int ks = detail::perm_sign(image);
            acc += static_cast<long long>(sign_prod) * ks;
        }

        // advance odometer
        int k = 0;
        while (k <= g && !std::next_permutation(perms[k].values.begin(), perms[k].values.end()))
            ++k;
        if (k > g) break;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Determinant cache over point tuples.
// ---------------------------------------------------------------------------

/// Memoized g x g determinants of sample columns. Keys are SORTED column
/// tuples; the stored value is the determinant in sorted order, and lookups
/// for an arbitrary ordering multiply by the sorting parity. An unsorted key
/// would silently conflate values of opposite sign.
template <class F>
class DetCache {
public:
    /// fx: g x (number of x points); fp: g x (number of fixed trailing
    /// points), appended as the last columns of every determinant.
    DetCache(const Matrix<F>& fx, Matrix<F> fp, int tuple_len)
        : fx_(fx), fp_(std::move(fp)), tuple_len_(tuple_len) {}

    /// Precompute all determinants over sorted tuples of the given columns.
    void prefill(int npoints) {
        std::vector<int> idx(tuple_len_);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            cache_[idx] = compute(idx);
            int k = tuple_len_ - 1;
            while (k >= 0 && idx[k] == npoints - (tuple_len_ - k)) --k;
            if (k < 0) break;
            ++idx[k];
            for (int j = k + 1; j < tuple_len_; ++j) idx[j] = idx[j - 1] + 1;
        }
    }

    /// Determinant with columns (fx[c] for c in cols) + fp columns; cols in
    /// the given order. Repeated columns give zero.
    F get(std::vector<int> cols) const {
        int parity = 1;
        for (std::size_t i = 1; i < cols.size(); ++i)  // insertion sort, tracks sign
            for (std::size_t j = i; j > 0 && cols[j - 1] > cols[j]; --j) {
                std::swap(cols[j - 1], cols[j]);
                parity = -parity;
            }
        for (std::size_t i = 1; i < cols.size(); ++i)
            if (cols[i] == cols[i - 1]) return field_traits<F>::zero(fx_(0, 0));
        auto it = cache_.find(cols);
        F d = (it != cache_.end()) ? it->second : compute(cols);
        return parity > 0 ? d : -d;
    }

    F compute(const std::vector<int>& cols) const {
        const std::size_t gdim = fx_.rows();
        Matrix<F> m(gdim, gdim, field_traits<F>::zero(fx_(0, 0)));
        for (std::size_t r = 0; r < gdim; ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) m(r, c) = fx_(r, cols[c]);
            for (std::size_t c = 0; c < gdim - cols.size(); ++c)
                m(r, cols.size() + c) = fp_(r, c);
        }
        return det(m);
    }

private:
    const Matrix<F>& fx_;
    Matrix<F> fp_;
    int tuple_len_;
    std::map<std::vector<int>, F> cache_;
};

// ---------------------------------------------------------------------------
// Permutation sums.
// ---------------------------------------------------------------------------

struct SumPlan {
    enum class Mode { Full, ReducedPrimeM } mode = Mode::Full;
    bool det_cache = true;
    unsigned long long max_perms = 5'000'000ull;
    bool force = false;
    int threads = 1;
};

template <class F>
struct SumResult {
    F value;
    double abs_sum = 0;   // sum of |term| (approximate field only)
    double abs_max = 0;   // max |term|
    unsigned long long terms = 0;
};

namespace detail {

inline unsigned long long factorial(int n) {
    unsigned long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline std::vector<int> nth_permutation(std::vector<int> sorted, unsigned long long rank) {
    std::vector<int> out;
    out.reserve(sorted.size());
    while (!sorted.empty()) {
        unsigned long long f = factorial(static_cast<int>(sorted.size()) - 1);
        std::size_t i = static_cast<std::size_t>(rank / f);
        rank %= f;
        out.push_back(sorted[i]);
        sorted.erase(sorted.begin() + i);
    }
    return out;
}

/// Sums term(s, sgn(s)) over all permutations of `elems` (given sorted).
/// Parallel over lexicographic blocks; the approximate field is reduced in
/// fixed block order so results are reproducible run to run.
template <class F, class Term>
SumResult<F> permutation_sum(const std::vector<int>& elems, const Term& term, F zero,
                             int threads) {
    const unsigned long long total = factorial(static_cast<int>(elems.size()));
    threads = std::max(1, threads);
    const int nblocks = threads;
    std::vector<SumResult<F>> partial(nblocks, SumResult<F>{zero, 0, 0, 0});

    auto run_block = [&](int b) {
        unsigned long long lo = total * b / nblocks, hi = total * (b + 1) / nblocks;
        if (lo >= hi) return;
        std::vector<int> s = nth_permutation(elems, lo);
        SumResult<F>& acc = partial[b];
        for (unsigned long long r = lo; r < hi; ++r) {
            int sign = perm_sign(s);
            F t = term(s, sign);
            acc.value += t;
            if constexpr (!field_traits<F>::exact) {
                double a = field_traits<F>::pivot_weight(t);
                acc.abs_sum += a;
                acc.abs_max = std::max(acc.abs_max, a);
            }
            ++acc.terms;
            std::next_permutation(s.begin(), s.end());
        }
    };

    if (nblocks == 1) {
        run_block(0);
    } else {
        std::vector<std::thread> pool;
        for (int b = 0; b < nblocks; ++b) pool.emplace_back(run_block, b);
        for (auto& t : pool) t.join();
    }

    SumResult<F> out{zero, 0, 0, 0};
    for (const auto& p : partial) {
        out.value += p.value;
        out.abs_sum += p.abs_sum;
        out.abs_max = std::max(out.abs_max, p.abs_max);
        out.terms += p.terms;
    }
    return out;
}

}  // namespace detail

/// det_I ff: determinant of the matrix (ff_m(x_i)), rows the given points,
/// columns the flat pair indices in I (1-based), ff_{m(i,j)} = f_i f_j.
template <class F>
F lhs_det(const Matrix<F>& f, const PairScheme& sch, const std::vector<int>& index_set,
          const std::vector<int>& pts) {
    if (index_set.size() != pts.size()) throw std::invalid_argument("lhs_det: shape mismatch");
    const std::size_t n = index_set.size();
    Matrix<F> m(n, n, field_traits<F>::zero(f(0, 0)));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            auto [i, j] = sch.pair_of(index_set[c]);
            m(r, c) = f(i - 1, pts[r]) * f(j - 1, pts[r]);
        }
    return det(m);
}

/// Unconditioned sum (n = g): sum over P_M of sgn(s) prod_{j=1..g+1}
/// det f(x_{d^j(s)}). Reduced mode sums over the subset P'_M with
/// s_1 = 1, s_2 < ... < s_g, s_2 < s_i (g+1 <= i <= 2g-1) and multiplies
/// by (g+1)!; it returns the same value and is only valid here (n = g).
template <class F>
SumResult<F> rhs_unconditioned(const Matrix<F>& f, const SumPlan& plan) {
    const int g = static_cast<int>(f.rows());
    PairScheme sch(g);
    if (static_cast<int>(f.cols()) != sch.M)
        throw std::invalid_argument("rhs_unconditioned: need M = g(g+1)/2 points");
    const unsigned long long nperms = detail::factorial(sch.M);
    if (nperms > plan.max_perms && !plan.force) throw BudgetExceeded(nperms);

    DetCache<F> cache(f, Matrix<F>(g, 0, field_traits<F>::zero(f(0, 0))), g);
    if (plan.det_cache) cache.prefill(sch.M);

    // d-tuple pair indices, 0-based
    std::vector<std::vector<int>> tp(g + 1, std::vector<int>(g));
    for (int k = 1; k <= g + 1; ++k)
        for (int a = 1; a <= g; ++a) tp[k - 1][a - 1] = sch.tuple_pair(k, a) - 1;

    const bool reduced = plan.mode == SumPlan::Mode::ReducedPrimeM;
    std::vector<int> elems(sch.M);
    std::iota(elems.begin(), elems.end(), 0);

    auto term = [&](const std::vector<int>& s, int sign) -> F {
        if (reduced) {
            if (s[0] != 0) return field_traits<F>::zero(f(0, 0));
            for (int i = 2; i < g; ++i)
                if (s[i - 1] > s[i]) return field_traits<F>::zero(f(0, 0));
            for (int i = g; i < 2 * g - 1; ++i)
                if (s[1] > s[i]) return field_traits<F>::zero(f(0, 0));
        }
        F prod = field_traits<F>::one(f(0, 0));
        std::vector<int> cols(g);
        for (int k = 0; k <= g; ++k) {
            for (int a = 0; a < g; ++a) cols[a] = s[tp[k][a]];
            prod *= cache.get(cols);
            if (field_traits<F>::exact && field_traits<F>::is_zero(prod, 0.0)) break;
        }
        return sign > 0 ? prod : -prod;
    };

    auto res = detail::permutation_sum(elems, term, field_traits<F>::zero(f(0, 0)), plan.threads);
    if (reduced) {
        unsigned long long mult = detail::factorial(g + 1);
        F m = field_traits<F>::zero(f(0, 0));
        F one = field_traits<F>::one(f(0, 0));
        for (unsigned long long i = 0; i < mult; ++i) m += one;
        res.value *= m;
        res.abs_sum *= static_cast<double>(mult);
    }
    return res;
}

/// Conditioned sum (Lemma with f_i(p_j) = delta_ij, i <= j): the L-point
/// permutation sum whose first n factors are full-point determinants and
/// whose remaining g+1-n factors use n x-points plus the fixed p-points.
/// Returns the raw sum; callers divide by c_{g,n}.
template <class F>
SumResult<F> rhs_conditioned(const Matrix<F>& fx, const Matrix<F>& fp, int n,
                             const SumPlan& plan) {
    const int g = static_cast<int>(fx.rows());
    PairScheme sch(g);
    const int L = sch.L(n);
    if (static_cast<int>(fx.cols()) != L)
        throw std::invalid_argument("rhs_conditioned: need L x-points");
    if (static_cast<int>(fp.cols()) != g - n)
        throw std::invalid_argument("rhs_conditioned: need g-n conditioning points");
    const unsigned long long nperms = detail::factorial(L);
    if (nperms > plan.max_perms && !plan.force) throw BudgetExceeded(nperms);

    DetCache<F> full(fx, Matrix<F>(g, 0, field_traits<F>::zero(fx(0, 0))), g);
    DetCache<F> cond(fx, fp, n);
    if (plan.det_cache) {
        if (n == g) full.prefill(L);
        else { full.prefill(L); cond.prefill(L); }
    }

    std::vector<std::vector<int>> tp(g + 1);
    for (int k = 1; k <= g + 1; ++k) {
        int len = k <= n ? g : n;
        tp[k - 1].resize(len);
        for (int a = 1; a <= len; ++a) tp[k - 1][a - 1] = sch.tuple_pair(k, a) - 1;
    }

    std::vector<int> elems(L);
    std::iota(elems.begin(), elems.end(), 0);

    auto term = [&](const std::vector<int>& s, int sign) -> F {
        F prod = field_traits<F>::one(fx(0, 0));
        for (int k = 0; k <= g; ++k) {
            std::vector<int> cols(tp[k].size());
            for (std::size_t a = 0; a < cols.size(); ++a) cols[a] = s[tp[k][a]];
            prod *= (k < n ? full.get(cols) : cond.get(cols));
            if (field_traits<F>::exact && field_traits<F>::is_zero(prod, 0.0)) break;
        }
        return sign > 0 ? prod : -prod;
    };

    return detail::permutation_sum(elems, term, field_traits<F>::zero(fx(0, 0)), plan.threads);
}

/// Extended sum over I = I_{M,n} + the extra pair (i,j), n < i < j <= g.
/// The two d-tuples touching the extra pair pick up n+1 x-points and omit
/// one conditioning point each (tuple i omits p_j, tuple j+1 omits p_i).
/// Returns the raw sum; callers divide by c'_{g,n}.
template <class F>
SumResult<F> rhs_extended(const Matrix<F>& fx, const Matrix<F>& fp, int n,
                          std::pair<int, int> extra, const SumPlan& plan) {
    const int g = static_cast<int>(fx.rows());
    PairScheme sch(g);
    const int L = sch.L(n);
    int ei = extra.first, ej = extra.second;
    if (ei > ej) std::swap(ei, ej);
    if (!(n < ei && ei < ej && ej <= g))
        throw std::invalid_argument("rhs_extended: extra pair must satisfy n < i < j <= g");
    if (static_cast<int>(fx.cols()) != L + 1)
        throw std::invalid_argument("rhs_extended: need L+1 x-points");
    const unsigned long long nperms = detail::factorial(L + 1);
    if (nperms > plan.max_perms && !plan.force) throw BudgetExceeded(nperms);

    // Ordered index set: flat indices of I_{M,n} then the extra pair.
    // Position q in the permutation corresponds to x-point q (0-based).
    std::vector<int> index_set;
    for (int l = 1; l <= L; ++l) index_set.push_back(l);
    index_set.push_back(sch.flat(ei, ej));
    std::vector<int> slot_of(sch.M + 1, -1);
    for (std::size_t q = 0; q < index_set.size(); ++q) slot_of[index_set[q]] = static_cast<int>(q);

    F zero = field_traits<F>::zero(fx(0, 0));
    DetCache<F> full(fx, Matrix<F>(g, 0, zero), g);
    // Conditioning-point column subsets for the three det families.
    auto fp_subset = [&](int omit) {  // omit = 0: none, else omit p_omit
        int w = g - n - (omit ? 1 : 0);
        Matrix<F> m(g, w, zero);
        int c = 0;
        for (int b = n + 1; b <= g; ++b) {
            if (b == omit) continue;
            for (int r = 0; r < g; ++r) m(r, c) = fp(r, b - n - 1);
            ++c;
        }
        return m;
    };
    DetCache<F> cond(fx, fp_subset(0), n);
    DetCache<F> cond_no_pi(fx, fp_subset(ei), n + 1);
    DetCache<F> cond_no_pj(fx, fp_subset(ej), n + 1);
    if (plan.det_cache) {
        full.prefill(L + 1);
        cond.prefill(L + 1);
        cond_no_pi.prefill(L + 1);
        cond_no_pj.prefill(L + 1);
    }

    // d-tuple slot lists (0-based positions into the permutation vector)
    std::vector<std::vector<int>> tp(g + 1);
    for (int k = 1; k <= g + 1; ++k) {
        std::vector<int>& v = tp[k - 1];
        if (k <= n) {
            for (int a = 1; a <= g; ++a) v.push_back(slot_of[sch.tuple_pair(k, a)]);
        } else {
            for (int a = 1; a <= n; ++a) v.push_back(slot_of[sch.tuple_pair(k, a)]);
            if (k == ei) v.push_back(slot_of[sch.flat(ei, ej)]);    // position ej
            if (k == ej + 1) v.push_back(slot_of[sch.flat(ei, ej)]);  // position ei
        }
        for (int x : v)
            if (x < 0) throw std::logic_error("rhs_extended: d-tuple outside index set");
    }

    std::vector<int> elems(L + 1);
    std::iota(elems.begin(), elems.end(), 0);

    auto term = [&](const std::vector<int>& s, int sign) -> F {
        F prod = field_traits<F>::one(fx(0, 0));
        for (int k = 1; k <= g + 1; ++k) {
            std::vector<int> cols(tp[k - 1].size());
            for (std::size_t a = 0; a < cols.size(); ++a) cols[a] = s[tp[k - 1][a]];
            if (k <= n) prod *= full.get(cols);
            else if (k == ei) prod *= cond_no_pj.get(cols);
            else if (k == ej + 1) prod *= cond_no_pi.get(cols);
            else prod *= cond.get(cols);
            if (field_traits<F>::exact && field_traits<F>::is_zero(prod, 0.0)) break;
        }
        return sign > 0 ? prod : -prod;
    };

    auto res = detail::permutation_sum(elems, term, zero, plan.threads);
    // The delta-reduction of a special determinant is orientation-preserving
    // when its extra sample column sits where the omitted conditioning point
    // would be; moving it next to the other sample columns costs a fixed
    // parity per special tuple.
    if (((ei - n - 1) + (ej - n - 1)) % 2 != 0) res.value = -res.value;
    return res;
}

/// The genus-g main vanishing sum: over P_{2g},
///   sgn(s) det w(x_{s1..sg}) det w(x_{sg..s_{2g-1}})
///   det w(x_{s1}, x_{s_{g+1}}, x_{s_{2g}}, p_3..p'_i..p_g)
///   det w(x_{s2}, x_{s_{g+2}}, x_{s_{2g}}, p_3..p'_j..p_g)
///   prod_{k=3}^{g-1} det w(x_{sk}, x_{s_{k+g}}, p_3..p_g).
/// p holds the g-2 conditioning points p_3..p_g as columns.
template <class F>
SumResult<F> theorem_main_sum(const Matrix<F>& omega, const Matrix<F>& p,
                              std::pair<int, int> ij, const SumPlan& plan) {
    const int g = static_cast<int>(omega.rows());
    if (static_cast<int>(omega.cols()) != 2 * g)
        throw std::invalid_argument("theorem_main_sum: need 2g sample points");
    if (static_cast<int>(p.cols()) != g - 2)
        throw std::invalid_argument("theorem_main_sum: need g-2 conditioning points");
    int i = ij.first, j = ij.second;
    if (!(3 <= i && i < j && j <= g))
        throw std::invalid_argument("theorem_main_sum: need 3 <= i < j <= g");
    const unsigned long long nperms = detail::factorial(2 * g);
    if (nperms > plan.max_perms && !plan.force) throw BudgetExceeded(nperms);

    F zero = field_traits<F>::zero(omega(0, 0));
    auto p_subset = [&](int omit) {  // omit = 0: all of p_3..p_g
        int w = g - 2 - (omit ? 1 : 0);
        Matrix<F> m(g, w, zero);
        int c = 0;
        for (int b = 3; b <= g; ++b) {
            if (b == omit) continue;
            for (int r = 0; r < g; ++r) m(r, c) = p(r, b - 3);
            ++c;
        }
        return m;
    };

    DetCache<F> full(omega, Matrix<F>(g, 0, zero), g);
    DetCache<F> tri_no_pi(omega, p_subset(i), 3);
    DetCache<F> tri_no_pj(omega, p_subset(j), 3);
    DetCache<F> duo(omega, p_subset(0), 2);
    if (plan.det_cache) {
        full.prefill(2 * g);
        tri_no_pi.prefill(2 * g);
        tri_no_pj.prefill(2 * g);
        duo.prefill(2 * g);
    }

    std::vector<int> elems(2 * g);
    std::iota(elems.begin(), elems.end(), 0);

    auto term = [&](const std::vector<int>& s, int sign) -> F {
        std::vector<int> cols(g);
        for (int a = 0; a < g; ++a) cols[a] = s[a];
        F prod = full.get(cols);
        for (int a = 0; a < g; ++a) cols[a] = s[g - 1 + a];
        prod *= full.get(cols);
        prod *= tri_no_pi.get({s[0], s[g], s[2 * g - 1]});
        prod *= tri_no_pj.get({s[1], s[g + 1], s[2 * g - 1]});
        for (int k = 3; k <= g - 1; ++k) prod *= duo.get({s[k - 1], s[k - 1 + g]});
        return sign > 0 ? prod : -prod;
    };

    return detail::permutation_sum(elems, term, zero, plan.threads);
}

}  // namespace canonic::combdet
