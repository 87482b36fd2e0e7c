#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "canonic/symidx.hpp"

namespace canonic::curvemodel {

/// Genus-4 canonical curve: intersection of a quadric and a cubic in P^3.
struct CurveModel {
    static constexpr int g = 4;
    std::vector<Cplx> quadric;  // 10 coefficients, DiagFirst n=2
    std::vector<Cplx> cubic;    // 20 coefficients, DiagFirst n=3
    std::uint64_t seed = 0;
    std::string name = "random";

    Cplx eval_quadric(const std::array<Cplx, 4>& x) const;
    Cplx eval_cubic(const std::array<Cplx, 4>& x) const;
    std::array<Cplx, 4> grad_quadric(const std::array<Cplx, 4>& x) const;
    std::array<Cplx, 4> grad_cubic(const std::array<Cplx, 4>& x) const;

    /// Jacobian of (Q,F) has rank 2 at x (relative tolerance on the 2x2 minors).
    bool smooth_at(const std::array<Cplx, 4>& x, double tol = 1e-6) const;
};

/// Q = x1^2+..+x4^2, F = x1^3+..+x4^3 (smooth: the Fermat-type pair).
CurveModel fermat_model();

/// Random small-integer model; retries until a probe slice yields six points
/// passing the smoothness spot-check. Throws std::runtime_error when the
/// retry budget is exhausted.
CurveModel random_model(std::uint64_t seed);

struct SampledPoint {
    std::array<Cplx, 4> coords;  // max-modulus coordinate == 1
    Cplx chart_scale;            // divisor applied during normalization
    double residual_Q = 0;
    double residual_F = 0;
};

/// Intersect the curve with the hyperplane h.x = 0: restrict (Q,F) to the
/// plane, eliminate one unknown by a Sylvester resultant (degree 6), get
/// roots from companion-matrix eigenvalues, back-substitute and Newton-refine
/// on the full (Q,F,h) system. Points failing refinement are dropped.
std::vector<SampledPoint> slice_sample(const CurveModel& model,
                                       const std::array<Cplx, 4>& hyperplane);

struct SampleSet {
    CurveModel model;
    std::vector<SampledPoint> points;
    Matrix<Cplx> omega_evals;  // 4 x K; column j = coords of point j

    std::size_t size() const { return points.size(); }
};

/// Draw random hyperplane slices (seeded) until at least K distinct points
/// are collected; deterministic ordering by (slice index, root index).
SampleSet sample_curve(const CurveModel& model, int K, std::uint64_t seed);

/// M_n x K matrix of coordinate products per DiagFirst multi-index, n in {2,3}.
Matrix<Cplx> product_evals(const SampleSet& set, int n);

std::string to_json(const SampleSet& set);
SampleSet sampleset_from_json(const std::string& text);

}  // namespace canonic::curvemodel
