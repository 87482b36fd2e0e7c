// Python bindings for the main library operations.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "canonic/combdet.hpp"
#include "canonic/curvemodel.hpp"
#include "canonic/petri.hpp"
#include "canonic/siegel.hpp"

namespace py = pybind11;
using namespace canonic;

namespace {

Matrix<Cplx> cmatrix(const std::vector<std::vector<Cplx>>& rows) {
    const std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    Matrix<Cplx> m(r, c, Cplx{});
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("ragged matrix");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix<double> dmatrix(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    Matrix<double> m(r, c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("ragged matrix");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<std::vector<Cplx>> pylist(const Matrix<Cplx>& m) {
    std::vector<std::vector<Cplx>> out(m.rows(), std::vector<Cplx>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

std::vector<std::vector<double>> pylist(const Matrix<double>& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

}  // namespace

PYBIND11_MODULE(_canonic, m) {
    m.doc() = "determinant identities, curve relations, theta and metric formulas";

    py::register_exception<combdet::BudgetExceeded>(m, "BudgetExceeded");
    py::register_exception<siegel::BudgetError>(m, "BudgetError");
    py::register_exception<petri::ConditioningError>(m, "ConditioningError");

    m.def(
        "constant",
        [](int g, int n, const std::string& kind, unsigned long long max_tuples,
           std::pair<int, int> extra) {
            combdet::ConstantKind k = kind == "cg"       ? combdet::ConstantKind::c_g
                                      : kind == "cprime" ? combdet::ConstantKind::c_prime_gn
                                                         : combdet::ConstantKind::c_gn;
            return combdet::constant(g, n, k, max_tuples, extra);
        },
        py::arg("g"), py::arg("n"), py::arg("kind") = "cgn",
        py::arg("max_tuples") = 50'000'000ull, py::arg("extra") = std::pair<int, int>{0, 0},
        "Enumerated combinatorial constant (kind: cgn | cg | cprime).");

    m.def(
        "theorem_main_sum",
        [](const std::vector<std::vector<Cplx>>& omega, const std::vector<std::vector<Cplx>>& p,
           std::pair<int, int> pair, unsigned long long max_perms, int threads) {
            combdet::SumPlan plan;
            plan.max_perms = max_perms;
            plan.threads = threads;
            auto r = combdet::theorem_main_sum(cmatrix(omega), cmatrix(p), pair, plan);
            return py::dict(py::arg("value") = r.value, py::arg("abs_sum") = r.abs_sum,
                            py::arg("abs_max") = r.abs_max, py::arg("terms") = r.terms);
        },
        py::arg("omega"), py::arg("p"), py::arg("pair"), py::arg("max_perms") = 5'000'000ull,
        py::arg("threads") = 1,
        "Signed determinant sum over permutations; cancels on curve data.");

    m.def(
        "sample_curve",
        [](const std::string& model, int K, std::uint64_t seed) {
            auto mdl = model == "fermat" ? curvemodel::fermat_model()
                                         : curvemodel::random_model(seed + 1);
            return curvemodel::to_json(curvemodel::sample_curve(mdl, K, seed + 7));
        },
        py::arg("model") = "fermat", py::arg("K") = 30, py::arg("seed") = 0,
        "Sample a genus-4 canonical model; returns the sample set as JSON text.");

    m.def(
        "curve_relations",
        [](const std::string& sampleset_json) {
            auto set = curvemodel::sampleset_from_json(sampleset_json);
            auto d = petri::build_curve_petri(set);
            py::dict out;
            out["basis_ok"] = d.basis_ok;
            out["cubic_fallback"] = d.cubic_fallback;
            out["p_cols"] = d.p_cols;
            out["C"] = pylist(d.C);
            out["D"] = pylist(d.D);
            out["B"] = pylist(d.B);
            out["psi"] = pylist(d.psi);
            return out;
        },
        py::arg("sampleset_json"),
        "Quadric/cubic relations and expansion data from a sample-set JSON string.");

    m.def(
        "theta",
        [](const std::vector<Cplx>& z, const std::vector<std::vector<Cplx>>& Z,
           const std::vector<double>& a, const std::vector<double>& b, double tol) {
            auto pp = siegel::make_period_point(cmatrix(Z));
            siegel::Characteristic ch;
            ch.a = a;
            ch.b = b;
            siegel::TruncationPolicy pol;
            pol.target_tol = tol;
            return siegel::theta(z, pp, ch, pol);
        },
        py::arg("z"), py::arg("Z"), py::arg("a"), py::arg("b"), py::arg("tol") = 1e-12,
        "Theta value with real characteristics at a period point.");

    m.def(
        "spin_census",
        [](int g) {
            auto [even, odd] = siegel::spin_census(g);
            return py::make_tuple(even, odd);
        },
        py::arg("g"), "Counts of even and odd half-integer characteristics.");

    m.def(
        "siegel_metric",
        [](const std::vector<std::vector<double>>& Y) {
            auto y = dmatrix(Y);
            auto t = build_sym_table(static_cast<int>(y.rows()), 2, IndexOrder::DiagFirst);
            return pylist(siegel::siegel_gS(y, t));
        },
        py::arg("Y"), "Metric coefficient matrix on symmetric coordinates.");

    m.def(
        "g_xi",
        [](const std::vector<std::vector<Cplx>>& B, const std::vector<std::vector<Cplx>>& tau) {
            auto pp = siegel::make_period_point(cmatrix(tau));
            auto t = build_sym_table(pp.g, 2, IndexOrder::DiagFirst);
            auto r = siegel::g_Xi(cmatrix(B), pp, t);
            return py::dict(py::arg("matrix") = pylist(r.matrix), py::arg("det") = r.det);
        },
        py::arg("B"), py::arg("tau"), "Metric pullback along a coefficient matrix.");
}
