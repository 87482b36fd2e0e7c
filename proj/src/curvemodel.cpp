#include "canonic/curvemodel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace canonic::curvemodel {

namespace {

const SymIndexTable& table2() {
    static const SymIndexTable t = build_sym_table(4, 2, IndexOrder::DiagFirst);
    return t;
}
const SymIndexTable& table3() {
    static const SymIndexTable t = build_sym_table(4, 3, IndexOrder::DiagFirst);
    return t;
}

/// Symmetric bilinear form of the quadric: A(y,z) with A(x,x) = Q(x).
Cplx bilinear(const std::vector<Cplx>& q, const std::array<Cplx, 4>& y,
              const std::array<Cplx, 4>& z) {
    const auto& t = table2();
    Cplx acc{};
    for (std::size_t m = 0; m < t.size(); ++m) {
        int a = t.entries[m][0] - 1, b = t.entries[m][1] - 1;
        acc += q[m] * 0.5 * (y[a] * z[b] + y[b] * z[a]);
    }
    return acc;
}

/// Symmetric trilinear form of the cubic: T(y,z,w) with T(x,x,x) = F(x).
Cplx trilinear(const std::vector<Cplx>& c, const std::array<Cplx, 4>& y,
               const std::array<Cplx, 4>& z, const std::array<Cplx, 4>& w) {
    const auto& t = table3();
    Cplx acc{};
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (std::size_t m = 0; m < t.size(); ++m) {
        std::array<int, 3> e = {t.entries[m][0] - 1, t.entries[m][1] - 1,
                                t.entries[m][2] - 1};
        Cplx s{};
        for (const auto& p : perms) s += y[e[p[0]]] * z[e[p[1]]] * w[e[p[2]]];
        acc += c[m] * (s / 6.0);
    }
    return acc;
}

double proj_distance(const std::array<Cplx, 4>& a, const std::array<Cplx, 4>& b) {
    Cplx inner{};
    double na = 0, nb = 0;
    for (int i = 0; i < 4; ++i) {
        inner += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    double cos2 = std::norm(inner) / (na * nb);
    return std::sqrt(std::max(0.0, 1.0 - cos2));
}

int argmax_abs(const std::array<Cplx, 4>& x) {
    int im = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(x[i]) > std::abs(x[im])) im = i;
    return im;
}

/// Newton refinement of (Q,F,h.x) = 0 with the max-modulus coordinate frozen
/// at 1. Returns false on divergence.
bool newton_refine(const CurveModel& model, const std::array<Cplx, 4>& h,
                   std::array<Cplx, 4>& x) {
    int frozen = argmax_abs(x);
    Cplx scale = x[frozen];
    if (std::abs(scale) < 1e-14) return false;
    for (auto& xi : x) xi /= scale;

    int free_idx[3];
    for (int i = 0, k = 0; i < 4; ++i)
        if (i != frozen) free_idx[k++] = i;

    auto residual = [&](const std::array<Cplx, 4>& y) {
        Eigen::Vector3cd r;
        r(0) = model.eval_quadric(y);
        r(1) = model.eval_cubic(y);
        r(2) = y[0] * h[0] + y[1] * h[1] + y[2] * h[2] + y[3] * h[3];
        return r;
    };

    Eigen::Vector3cd r = residual(x);
    for (int step = 0; step < 30; ++step) {
        if (r.norm() <= 1e-13) break;
        auto gq = model.grad_quadric(x);
        auto gf = model.grad_cubic(x);
        Eigen::Matrix3cd J;
        for (int k = 0; k < 3; ++k) {
            J(0, k) = gq[free_idx[k]];
            J(1, k) = gf[free_idx[k]];
            J(2, k) = h[free_idx[k]];
        }
        Eigen::Vector3cd delta = J.partialPivLu().solve(r);
        double lambda = 1.0;
        bool improved = false;
        for (int halve = 0; halve < 12; ++halve) {
            std::array<Cplx, 4> trial = x;
            for (int k = 0; k < 3; ++k) trial[free_idx[k]] -= lambda * delta(k);
            Eigen::Vector3cd rt = residual(trial);
            if (rt.norm() < r.norm()) {
                x = trial;
                r = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    return std::max(std::abs(r(0)), std::abs(r(1))) <= 1e-12 && std::abs(r(2)) <= 1e-11;
}

}  // namespace

Cplx CurveModel::eval_quadric(const std::array<Cplx, 4>& x) const {
    return bilinear(quadric, x, x);
}

Cplx CurveModel::eval_cubic(const std::array<Cplx, 4>& x) const {
    return trilinear(cubic, x, x, x);
}

std::array<Cplx, 4> CurveModel::grad_quadric(const std::array<Cplx, 4>& x) const {
    std::array<Cplx, 4> g{};
    for (int a = 0; a < 4; ++a) {
        std::array<Cplx, 4> e{};
        e[a] = 1.0;
        g[a] = 2.0 * bilinear(quadric, e, x);
    }
    return g;
}

std::array<Cplx, 4> CurveModel::grad_cubic(const std::array<Cplx, 4>& x) const {
    std::array<Cplx, 4> g{};
    for (int a = 0; a < 4; ++a) {
        std::array<Cplx, 4> e{};
        e[a] = 1.0;
        g[a] = 3.0 * trilinear(cubic, e, x, x);
    }
    return g;
}

bool CurveModel::smooth_at(const std::array<Cplx, 4>& x, double tol) const {
    auto gq = grad_quadric(x);
    auto gf = grad_cubic(x);
    double nq = 0, nf = 0, best = 0;
    for (int i = 0; i < 4; ++i) {
        nq = std::max(nq, std::abs(gq[i]));
        nf = std::max(nf, std::abs(gf[i]));
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            best = std::max(best, std::abs(gq[a] * gf[b] - gq[b] * gf[a]));
    return best > tol * (nq * nf + 1e-300);
}

CurveModel fermat_model() {
    CurveModel m;
    m.name = "fermat";
    m.quadric.assign(table2().size(), Cplx{});
    m.cubic.assign(table3().size(), Cplx{});
    for (int i = 1; i <= 4; ++i) {
        m.quadric[table2().flat({i, i})] = 1.0;
        m.cubic[table3().flat({i, i, i})] = 1.0;
    }
    return m;
}

CurveModel random_model(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        CurveModel m;
        m.seed = seed;
        m.quadric.resize(table2().size());
        m.cubic.resize(table3().size());
        for (auto& q : m.quadric) q = static_cast<double>(coef(rng));
        for (auto& c : m.cubic) c = static_cast<double>(coef(rng));

        std::array<Cplx, 4> probe;
        for (auto& h : probe) h = Cplx(gauss(rng), gauss(rng));
        std::vector<SampledPoint> pts;
        try {
            pts = slice_sample(m, probe);
        } catch (const std::exception&) {
            continue;
        }
        if (pts.size() != 6) continue;
        bool ok = true;
        for (const auto& p : pts) ok = ok && m.smooth_at(p.coords);
        if (ok) return m;
    }
    throw std::runtime_error("random_model: retry budget exhausted");
}

std::vector<SampledPoint> slice_sample(const CurveModel& model,
                                       const std::array<Cplx, 4>& hyperplane) {
    const auto& h = hyperplane;
    int im = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(h[i]) > std::abs(h[im])) im = i;
    if (std::abs(h[im]) < 1e-14) throw std::invalid_argument("slice_sample: zero hyperplane");

    // basis of the plane h.x = 0: b_j = e_j - (h_j/h_im) e_im, j != im
    std::array<std::array<Cplx, 4>, 3> b{};
    {
        int k = 0;
        for (int j = 0; j < 4; ++j) {
            if (j == im) continue;
            b[k][j] = 1.0;
            b[k][im] = -h[j] / h[im];
            ++k;
        }
    }
    auto at = [&](Cplx u, Cplx v) {
        std::array<Cplx, 4> x{};
        for (int i = 0; i < 4; ++i) x[i] = u * b[0][i] + v * b[1][i] + b[2][i];
        return x;
    };

    // restricted quadric q(u,v) = sum q[p][r] u^p v^r via the bilinear form
    Cplx q20 = bilinear(model.quadric, b[0], b[0]);
    Cplx q02 = bilinear(model.quadric, b[1], b[1]);
    Cplx q11 = 2.0 * bilinear(model.quadric, b[0], b[1]);
    Cplx q10 = 2.0 * bilinear(model.quadric, b[0], b[2]);
    Cplx q01 = 2.0 * bilinear(model.quadric, b[1], b[2]);
    Cplx q00 = bilinear(model.quadric, b[2], b[2]);

    // restricted cubic c(u,v): coefficient of u^p v^r is multinomial(3;p,r,s)
    // times the trilinear form on (b1^p, b2^r, b3^s)
    auto tri = [&](int p, int r) {
        std::array<const std::array<Cplx, 4>*, 3> arg;
        int k = 0;
        for (int i = 0; i < p; ++i) arg[k++] = &b[0];
        for (int i = 0; i < r; ++i) arg[k++] = &b[1];
        while (k < 3) arg[k++] = &b[2];
        static const double multinom[4][4] = {
            {1, 3, 3, 1}, {3, 6, 3, 0}, {3, 3, 0, 0}, {1, 0, 0, 0}};
        return multinom[p][r] * trilinear(model.cubic, *arg[0], *arg[1], *arg[2]);
    };
    Cplx c30 = tri(3, 0), c21 = tri(2, 1), c12 = tri(1, 2), c03 = tri(0, 3);
    Cplx c20 = tri(2, 0), c11 = tri(1, 1), c02 = tri(0, 2);
    Cplx c10 = tri(1, 0), c01 = tri(0, 1), c00 = tri(0, 0);

    // Sylvester resultant in v: q = A2 v^2 + A1(u) v + A0(u),
    // c = B3 v^3 + B2(u) v^2 + B1(u) v + B0(u); det of the 5x5 matrix is a
    // degree-6 polynomial in u, recovered by evaluation at 7 nodes.
    auto resultant_at = [&](Cplx u) {
        Cplx A2 = q02, A1 = q11 * u + q01, A0 = q20 * u * u + q10 * u + q00;
        Cplx B3 = c03, B2 = c12 * u + c02, B1 = c21 * u * u + c11 * u + c01;
        Cplx B0 = ((c30 * u + c20) * u + c10) * u + c00;
        Eigen::Matrix<Cplx, 5, 5> S = Eigen::Matrix<Cplx, 5, 5>::Zero();
        for (int r = 0; r < 3; ++r) { S(r, r) = A2; S(r, r + 1) = A1; S(r, r + 2) = A0; }
        for (int r = 3; r < 5; ++r) {
            S(r, r - 3) = B3; S(r, r - 2) = B2; S(r, r - 1) = B1; S(r, r) = B0;
        }
        return S.determinant();
    };
    const int deg = 6;
    Eigen::MatrixXcd V(deg + 1, deg + 1);
    Eigen::VectorXcd rv(deg + 1);
    for (int k = 0; k <= deg; ++k) {
        Cplx u = 1.3 * std::exp(Cplx(0, 2.0 * M_PI * k / (deg + 1) + 0.37));
        Cplx pw = 1.0;
        for (int j = 0; j <= deg; ++j) { V(k, j) = pw; pw *= u; }
        rv(k) = resultant_at(u);
    }
    Eigen::VectorXcd coeffs = V.partialPivLu().solve(rv);

    // effective degree: drop negligible leading coefficients
    double cmax = 0;
    for (int j = 0; j <= deg; ++j) cmax = std::max(cmax, std::abs(coeffs(j)));
    if (cmax == 0) return {};
    int d = deg;
    while (d > 0 && std::abs(coeffs(d)) < 1e-10 * cmax) --d;
    if (d == 0) return {};

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; ++j) comp(j, d - 1) = -coeffs(j) / coeffs(d);
    for (int j = 1; j < d; ++j) comp(j, j - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

    std::vector<SampledPoint> out;
    for (int root = 0; root < d; ++root) {
        Cplx u = es.eigenvalues()(root);
        // candidates for v from the restricted quadric
        Cplx A2 = q02, A1 = q11 * u + q01, A0 = q20 * u * u + q10 * u + q00;
        std::vector<Cplx> vs;
        if (std::abs(A2) > 1e-12 * (std::abs(A1) + std::abs(A0))) {
            Cplx s = std::sqrt(A1 * A1 - 4.0 * A2 * A0);
            vs = {(-A1 + s) / (2.0 * A2), (-A1 - s) / (2.0 * A2)};
        } else if (std::abs(A1) > 0) {
            vs = {-A0 / A1};
        }
        // keep the candidate best satisfying the restricted cubic
        Cplx vbest{};
        double rbest = -1;
        for (Cplx v : vs) {
            Cplx cv = ((c03 * v + c12 * u + c02) * v + c21 * u * u + c11 * u + c01) * v +
                      ((c30 * u + c20) * u + c10) * u + c00;
            if (rbest < 0 || std::abs(cv) < rbest) { rbest = std::abs(cv); vbest = v; }
        }
        if (rbest < 0) continue;

        std::array<Cplx, 4> x = at(u, vbest);
        double norm0 = std::abs(x[argmax_abs(x)]);
        if (!(norm0 > 0) || !std::isfinite(norm0)) continue;
        std::array<Cplx, 4> raw = x;
        if (!newton_refine(model, h, x)) continue;

        SampledPoint p;
        p.coords = x;
        p.chart_scale = raw[argmax_abs(raw)];
        p.residual_Q = std::abs(model.eval_quadric(x));
        p.residual_F = std::abs(model.eval_cubic(x));
        bool dup = false;
        for (const auto& prev : out) dup = dup || proj_distance(prev.coords, x) < 1e-8;
        if (!dup) out.push_back(p);
    }
    return out;
}

SampleSet sample_curve(const CurveModel& model, int K, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SampleSet set;
    set.model = model;
    const int max_slices = 10 * K + 50;
    for (int slice = 0; slice < max_slices && static_cast<int>(set.points.size()) < K;
         ++slice) {
        std::array<Cplx, 4> h;
        for (auto& hi : h) hi = Cplx(gauss(rng), gauss(rng));
        std::vector<SampledPoint> pts;
        try {
            pts = slice_sample(model, h);
        } catch (const std::exception&) {
            continue;
        }
        for (const auto& p : pts) {
            bool dup = false;
            for (const auto& prev : set.points)
                dup = dup || proj_distance(prev.coords, p.coords) < 1e-8;
            if (!dup) set.points.push_back(p);
        }
    }
    if (static_cast<int>(set.points.size()) < K)
        throw std::runtime_error("sample_curve: could not collect enough points");
    set.points.resize(K);
    set.omega_evals = Matrix<Cplx>(4, K, Cplx{});
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < 4; ++i) set.omega_evals(i, j) = set.points[j].coords[i];
    return set;
}

Matrix<Cplx> product_evals(const SampleSet& set, int n) {
    if (n != 2 && n != 3) throw std::invalid_argument("product_evals: n must be 2 or 3");
    const SymIndexTable& t = n == 2 ? table2() : table3();
    const std::size_t K = set.points.size();
    Matrix<Cplx> out(t.size(), K, Cplx{});
    for (std::size_t m = 0; m < t.size(); ++m)
        for (std::size_t j = 0; j < K; ++j) {
            Cplx prod = 1.0;
            for (int idx : t.entries[m]) prod *= set.omega_evals(idx - 1, j);
            out(m, j) = prod;
        }
    return out;
}

namespace {

nlohmann::json cplx_json(const Cplx& z) { return {z.real(), z.imag()}; }
Cplx cplx_from(const nlohmann::json& j) { return Cplx(j.at(0), j.at(1)); }

}  // namespace

std::string to_json(const SampleSet& set) {
    nlohmann::json j;
    j["schema"] = 1;
    j["model"]["name"] = set.model.name;
    j["model"]["seed"] = set.model.seed;
    for (const auto& q : set.model.quadric) j["model"]["quadric"].push_back(cplx_json(q));
    for (const auto& c : set.model.cubic) j["model"]["cubic"].push_back(cplx_json(c));
    for (const auto& p : set.points) {
        nlohmann::json pj;
        for (const auto& x : p.coords) pj["coords"].push_back(cplx_json(x));
        pj["chart_scale"] = cplx_json(p.chart_scale);
        pj["residual_Q"] = p.residual_Q;
        pj["residual_F"] = p.residual_F;
        j["points"].push_back(pj);
    }
    for (std::size_t i = 0; i < set.omega_evals.rows(); ++i) {
        nlohmann::json row;
        for (std::size_t k = 0; k < set.omega_evals.cols(); ++k)
            row.push_back(cplx_json(set.omega_evals(i, k)));
        j["omega_evals"].push_back(row);
    }
    return j.dump(2);
}

SampleSet sampleset_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("schema", 0) != 1) throw std::invalid_argument("unsupported schema");
    SampleSet set;
    set.model.name = j["model"].value("name", "random");
    set.model.seed = j["model"].value("seed", 0ull);
    for (const auto& q : j["model"]["quadric"]) set.model.quadric.push_back(cplx_from(q));
    for (const auto& c : j["model"]["cubic"]) set.model.cubic.push_back(cplx_from(c));
    for (const auto& pj : j["points"]) {
        SampledPoint p;
        for (int i = 0; i < 4; ++i) p.coords[i] = cplx_from(pj["coords"][i]);
        p.chart_scale = cplx_from(pj["chart_scale"]);
        p.residual_Q = pj["residual_Q"];
        p.residual_F = pj["residual_F"];
        set.points.push_back(p);
    }
    const auto& om = j["omega_evals"];
    set.omega_evals = Matrix<Cplx>(om.size(), om.empty() ? 0 : om[0].size(), Cplx{});
    for (std::size_t i = 0; i < om.size(); ++i)
        for (std::size_t k = 0; k < om[i].size(); ++k)
            set.omega_evals(i, k) = cplx_from(om[i][k]);
    return set;
}

}  // namespace canonic::curvemodel
