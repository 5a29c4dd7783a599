#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperflow/edge_slots.hpp"
#include "hyperflow/lobachevsky.hpp"
#include "hyperflow/quadrature.hpp"

// Single hyper-ideal tetrahedron geometry.
//
// A hyper-ideal tetrahedron is a compact hyperbolic polyhedron shaped like a
// truncated tetrahedron: four right-angled hexagonal faces and four vertex
// triangles orthogonal to them. Its shape is determined by the six edge
// lengths l (edges = pairwise intersections of hexagonal faces), indexed by
// the slot order of edge_slots.hpp.
//
// Not every positive length vector is realized; the realizable set L is open
// in R^6_{>0} and its complement splits into three degenerate components
// Omega_1..Omega_3, separated from L by analytic walls X_1..X_3. Everything
// here is built on the scalar invariant
//
//   phi_s(l) = cos(dihedral angle at slot s)   for l in L,
//
// which stays defined on all of R^6_{>0} and detects degeneration by
// |phi| >= 1. Dihedral angles extend continuously to all of R^6 by clamping
// negative lengths to zero and clamping phi into [-1, 1]; the extended angle
// is constant (0 or pi) on the closed degenerate regions.

namespace hyperflow {

template <typename Scalar>
using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Mat6 = Eigen::Matrix<Scalar, 6, 6>;

using Vec6d = Vec6<double>;
using Mat6d = Mat6<double>;

// Replacement value for clamped-to-zero coordinates. The angle extension is
// defined by continuity at the coordinate boundary where the raw formulas
// divide by sinh(0); evaluating at eps instead introduces O(eps)-level error.
inline constexpr double kBoundaryGuard = 1e-9;

// Wall-detection tolerance: nondegenerate means |phi| < 1 - tol for all six
// slots, and |phi + 1| <= tol is reported as a wall.
inline constexpr double kDegenerateTol = 1e-12;

enum class Region {
    NonDegenerate,
    Omega1,  // phi <= -1 on slot pair {0,5}
    Omega2,  // phi <= -1 on slot pair {1,4}
    Omega3,  // phi <= -1 on slot pair {2,3}
    Wall1,
    Wall2,
    Wall3,
};

inline const char* to_string(Region r)
{
    switch (r) {
        case Region::NonDegenerate: return "nondegenerate";
        case Region::Omega1: return "Omega1";
        case Region::Omega2: return "Omega2";
        case Region::Omega3: return "Omega3";
        case Region::Wall1: return "Wall1";
        case Region::Wall2: return "Wall2";
        case Region::Wall3: return "Wall3";
    }
    return "?";
}

inline bool is_omega(Region r)
{
    return r == Region::Omega1 || r == Region::Omega2 || r == Region::Omega3;
}

namespace detail {

// cosh(x) - 1 for the vertex edge x subtended by edges a, b meeting a vertex
// triangle, with c opposite:
//
//   cosh x = (cosh a cosh b + cosh c) / (sinh a sinh b),
//
// computed as u = (cosh(a-b) + cosh c) / (sinh a sinh b) via exponentials
// scaled by e^{-a-b}. This form has no cancellation for large lengths (where
// u underflows gracefully instead of evaluating cosh(x) = 1 exactly) and no
// overflow for guarded small lengths; u is capped into [DBL_MIN, 1e100] so
// that downstream products of two u's never reach infinity.
template <typename Scalar>
Scalar vertex_edge_coshm1(Scalar a, Scalar b, Scalar c)
{
    using std::exp;
    using std::expm1;
    Scalar z = c - a - b;
    if (z > Scalar(400)) z = Scalar(400);
    const Scalar num =
        Scalar(2) * (exp(Scalar(-2) * a) + exp(Scalar(-2) * b) + exp(z) + exp(-(c + a + b)));
    const Scalar den = expm1(Scalar(-2) * a) * expm1(Scalar(-2) * b);
    Scalar u = num / den;
    u = std::max(u, Scalar(std::numeric_limits<double>::min()));
    return std::min(u, Scalar(1e100));
}

// cos of the vertex-triangle angle between the vertex edges with
// cosh - 1 values u1, u2, opposite u3 (hyperbolic law of cosines written in
// u = cosh - 1 variables, exact rearrangement):
//
//   cos = (u1 + u2 - u3 + u1 u2) / (sqrt(u1(u1+2)) sqrt(u2(u2+2))).
template <typename Scalar>
Scalar phi_from_u(Scalar u1, Scalar u2, Scalar u3)
{
    using std::sqrt;
    return (u1 + u2 - u3 + u1 * u2) / (sqrt(u1 * (u1 + Scalar(2))) * sqrt(u2 * (u2 + Scalar(2))));
}

template <typename Scalar>
void check_positive_lengths(const Vec6<Scalar>& l, const char* who)
{
    for (int s = 0; s < kNumEdgeSlots; ++s)
        if (!(l[s] > Scalar(0)))
            throw std::domain_error(std::string(who) + ": edge lengths must be positive; slot " +
                                    std::to_string(s) + " is " + std::to_string(double(l[s])));
}

}  // namespace detail

// Length of the vertex edge cut off by the vertex triangle between edges of
// lengths a and b, with c the opposite edge in the same hexagon. All inputs
// must be positive; the arccosh argument is then strictly greater than 1.
template <typename Scalar>
Scalar vertex_edge_length(Scalar a, Scalar b, Scalar c)
{
    using std::log1p;
    using std::sqrt;
    if (!(a > Scalar(0) && b > Scalar(0) && c > Scalar(0)))
        throw std::domain_error("vertex_edge_length: inputs must be positive");
    const Scalar u = detail::vertex_edge_coshm1(a, b, c);
    return log1p(u + sqrt(u * (u + Scalar(2))));  // arccosh(1 + u)
}

// phi for the edge at `slot`, computed from one of its two endpoint vertex
// triangles (`endpoint` 0 or 1). The two routes agree identically as
// functions on R^6_{>0}; exposing both makes the identity testable.
template <typename Derived>
typename Derived::Scalar phi_from_vertex(const Eigen::MatrixBase<Derived>& l, int slot,
                                         int endpoint)
{
    using Scalar = typename Derived::Scalar;
    int i = kSlotVertices[static_cast<std::size_t>(slot)][0];
    int j = kSlotVertices[static_cast<std::size_t>(slot)][1];
    if (endpoint == 1) std::swap(i, j);
    int k = -1, h = -1;
    for (int v = 0; v < 4; ++v)
        if (v != i && v != j) (k < 0 ? k : h) = v;

    const Scalar u1 = detail::vertex_edge_coshm1<Scalar>(l[slot_of(i, j)], l[slot_of(i, k)],
                                                         l[slot_of(j, k)]);
    const Scalar u2 = detail::vertex_edge_coshm1<Scalar>(l[slot_of(i, j)], l[slot_of(i, h)],
                                                         l[slot_of(j, h)]);
    const Scalar u3 = detail::vertex_edge_coshm1<Scalar>(l[slot_of(i, k)], l[slot_of(i, h)],
                                                         l[slot_of(k, h)]);
    return detail::phi_from_u(u1, u2, u3);
}

// phi at one slot; requires all six entries strictly positive. Equals the
// cosine of the dihedral angle when l is a realizable length vector.
template <typename Derived>
typename Derived::Scalar phi(const Eigen::MatrixBase<Derived>& l, int slot)
{
    detail::check_positive_lengths<typename Derived::Scalar>(l, "phi");
    return phi_from_vertex(l, slot, 0);
}

// All six phi values, sharing the twelve vertex-edge computations.
template <typename Derived>
Vec6<typename Derived::Scalar> phi_all(const Eigen::MatrixBase<Derived>& l)
{
    using Scalar = typename Derived::Scalar;
    // u[v][slot of pair {p,q} not containing v]
    std::array<std::array<Scalar, 6>, 4> u{};
    for (int v = 0; v < 4; ++v) {
        std::array<int, 3> others{};
        int n = 0;
        for (int w = 0; w < 4; ++w)
            if (w != v) others[static_cast<std::size_t>(n++)] = w;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const int p = others[static_cast<std::size_t>(a)];
                const int q = others[static_cast<std::size_t>(b)];
                u[static_cast<std::size_t>(v)][static_cast<std::size_t>(slot_of(p, q))] =
                    detail::vertex_edge_coshm1<Scalar>(l[slot_of(v, p)], l[slot_of(v, q)],
                                                       l[slot_of(p, q)]);
            }
    }
    Vec6<Scalar> out;
    for (int s = 0; s < kNumEdgeSlots; ++s) {
        const int i = kSlotVertices[static_cast<std::size_t>(s)][0];
        const int j = kSlotVertices[static_cast<std::size_t>(s)][1];
        int k = -1, h = -1;
        for (int v = 0; v < 4; ++v)
            if (v != i && v != j) (k < 0 ? k : h) = v;
        const auto& ui = u[static_cast<std::size_t>(i)];
        out[s] = detail::phi_from_u(ui[static_cast<std::size_t>(slot_of(j, k))],
                                    ui[static_cast<std::size_t>(slot_of(j, h))],
                                    ui[static_cast<std::size_t>(slot_of(k, h))]);
    }
    return out;
}

// Componentwise max(l, 0) followed by the boundary guard.
template <typename Derived>
Vec6<typename Derived::Scalar> guarded_clamp(const Eigen::MatrixBase<Derived>& l)
{
    using Scalar = typename Derived::Scalar;
    Vec6<Scalar> out = l;
    for (int s = 0; s < kNumEdgeSlots; ++s)
        out[s] = std::max(out[s], Scalar(kBoundaryGuard));
    return out;
}

// Classify a (possibly generalized) length vector. Degenerate components are
// detected on the negative phi side: slot pairs {0,5}, {1,4}, {2,3} map to
// Omega1..Omega3. phi >= +1 only happens when another pair is <= -1, so the
// negative side sees every degeneration; a near +1 value without a matching
// negative-side hit is a tolerance collision and resolves to the wall tag.
template <typename Derived>
Region classify(const Eigen::MatrixBase<Derived>& l, double tol = kDegenerateTol)
{
    using Scalar = typename Derived::Scalar;
    const Vec6<Scalar> lg = guarded_clamp(l);
    const Vec6<Scalar> ph = phi_all(lg);

    int k_min = 0;
    Scalar min_pair = std::numeric_limits<Scalar>::max();
    for (int k = 0; k < 3; ++k) {
        const Scalar m = std::min(ph[k], ph[opposite_slot(k)]);
        if (m < min_pair) {
            min_pair = m;
            k_min = k;
        }
    }
    static constexpr Region omega_tag[3] = {Region::Omega1, Region::Omega2, Region::Omega3};
    static constexpr Region wall_tag[3] = {Region::Wall1, Region::Wall2, Region::Wall3};
    if (min_pair < Scalar(-1) - Scalar(tol)) return omega_tag[k_min];
    if (min_pair <= Scalar(-1) + Scalar(tol)) return wall_tag[k_min];
    Scalar max_abs = 0;
    for (int s = 0; s < kNumEdgeSlots; ++s) max_abs = std::max(max_abs, Scalar(std::abs(ph[s])));
    if (max_abs < Scalar(1) - Scalar(tol)) return Region::NonDegenerate;
    return wall_tag[k_min];
}

// Extended dihedral angles, defined and continuous on all of R^6:
// angle = arccos(clamp(phi(guarded_clamp(l)), -1, 1)). On realizable length
// vectors this is the true dihedral angle; on the closed degenerate regions
// it is constantly pi (the slot's pair hit phi <= -1) or 0 (phi >= +1).
template <typename Derived>
Vec6<typename Derived::Scalar> extended_angles(const Eigen::MatrixBase<Derived>& l)
{
    using Scalar = typename Derived::Scalar;
    using std::acos;
    const Vec6<Scalar> ph = phi_all(guarded_clamp(l));
    Vec6<Scalar> out;
    for (int s = 0; s < kNumEdgeSlots; ++s)
        out[s] = acos(std::clamp(ph[s], Scalar(-1), Scalar(1)));
    return out;
}

// Per-slot finite-difference steps for the angle Jacobian.
inline Vec6d jacobian_steps(const Vec6d& l, double h_rel)
{
    Vec6d h;
    for (int s = 0; s < kNumEdgeSlots; ++s) h[s] = h_rel * std::max(1.0, std::abs(l[s]));
    return h;
}

// Require NonDegenerate at l and at probes 10 steps out along every
// coordinate, so the central-difference stencil stays clear of the walls.
inline void require_jacobian_margin(const Vec6d& l, const Vec6d& h, const char* who)
{
    auto fail = [&](const Vec6d& point) {
        const Vec6d ph = phi_all(guarded_clamp(point));
        int worst = 0;
        for (int s = 1; s < kNumEdgeSlots; ++s)
            if (1.0 - std::abs(ph[s]) < 1.0 - std::abs(ph[worst])) worst = s;
        throw std::domain_error(std::string(who) +
                                ": length vector is degenerate or too close to a wall; slot " +
                                std::to_string(worst) + " has phi = " + std::to_string(ph[worst]));
    };
    if (classify(l) != Region::NonDegenerate) fail(l);
    for (int s = 0; s < kNumEdgeSlots; ++s) {
        for (double dir : {-1.0, 1.0}) {
            Vec6d probe = l;
            probe[s] += dir * 10.0 * h[s];
            if (classify(probe) != Region::NonDegenerate) fail(probe);
        }
    }
}

// Central finite-difference Jacobian d(angle)/d(length), not symmetrized.
// Column s differentiates along length slot s.
inline Mat6d angle_jacobian_raw(const Vec6d& l, double h_rel = 1e-6)
{
    const Vec6d h = jacobian_steps(l, h_rel);
    require_jacobian_margin(l, h, "angle_jacobian");
    Mat6d m;
    for (int s = 0; s < kNumEdgeSlots; ++s) {
        Vec6d lp = l, lm = l;
        lp[s] += h[s];
        lm[s] -= h[s];
        m.col(s) = (extended_angles(lp) - extended_angles(lm)) / (2.0 * h[s]);
    }
    return m;
}

// Symmetrized angle Jacobian; symmetric positive definite on the
// nondegenerate region.
inline Mat6d angle_jacobian(const Vec6d& l, double h_rel = 1e-6)
{
    const Mat6d m = angle_jacobian_raw(l, h_rel);
    return 0.5 * (m + m.transpose());
}

namespace detail {

// Breakpoints of t in (0,1) where the integrand of the co-volume line
// integral along p + t (q - p) loses smoothness: coordinate sign changes
// (clamping kinks) and wall crossings (|phi| through 1). Wall crossings are
// located by scanning a fixed grid per coordinate piece and bisecting sign
// changes; a crossing pair missed by the scan only slows the adaptive
// quadrature, it does not bias it.
inline std::vector<double> segment_breakpoints(const Vec6d& p, const Vec6d& q)
{
    std::vector<double> cuts{0.0, 1.0};
    for (int s = 0; s < kNumEdgeSlots; ++s) {
        if ((p[s] < 0.0 && q[s] > 0.0) || (p[s] > 0.0 && q[s] < 0.0))
            cuts.push_back(p[s] / (p[s] - q[s]));
    }
    std::sort(cuts.begin(), cuts.end());

    auto phi_at = [&](double t) -> Vec6d {
        return phi_all(guarded_clamp(Vec6d(p + t * (q - p))));
    };

    std::vector<double> walls;
    const int grid = 64;
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double a = cuts[piece], b = cuts[piece + 1];
        if (b - a < 1e-14) continue;
        Vec6d prev = phi_at(a);
        for (int g = 1; g <= grid; ++g) {
            const double t = a + (b - a) * g / grid;
            const Vec6d cur = phi_at(t);
            for (int s = 0; s < kNumEdgeSlots; ++s) {
                for (double level : {-1.0, 1.0}) {
                    const double fa = prev[s] - level, fb = cur[s] - level;
                    if ((fa < 0.0) == (fb < 0.0)) continue;
                    double lo = t - (b - a) / grid, hi = t, flo = fa;
                    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double fm = phi_at(mid)[s] - level;
                        if ((fm < 0.0) == (flo < 0.0)) {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                    walls.push_back(0.5 * (lo + hi));
                }
            }
            prev = cur;
        }
    }
    cuts.insert(cuts.end(), walls.begin(), walls.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-13; }),
               cuts.end());
    return cuts;
}

}  // namespace detail

// Line integral of the angle 1-form  sum_s angle_s dl_s  along the straight
// segment from `from` to `to`, by adaptive Gauss-Legendre split at the
// detected smoothness breakpoints. `abs_tol` is the absolute tolerance for
// the whole segment.
inline double covolume_line_integral(const Vec6d& from, const Vec6d& to, double abs_tol = 1e-9)
{
    const Vec6d d = to - from;
    if (d.isZero(0.0)) return 0.0;
    auto integrand = [&](double t) {
        return extended_angles(Vec6d(from + t * d)).dot(d);
    };
    const std::vector<double> cuts = detail::segment_breakpoints(from, to);
    double value = 0.0;
    double achieved = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const auto r = quadrature::adaptive(integrand, cuts[i], cuts[i + 1], abs_tol * len);
        value += r.value;
        achieved += r.error;
    }
    if (achieved > abs_tol) throw quadrature::QuadratureError(abs_tol, achieved);
    return value;
}

// The co-volume of a hyper-ideal tetrahedron is F = 2V + sum_s a_s l_s; its
// differential is the angle 1-form, which stays exact under the angle
// extension. This evaluates the extended co-volume as the line integral from
// the origin plus the value there, F(0) = 16 Psi(pi/4) (twice the volume of
// the regular ideal octahedron, the limit shape at l -> 0). C^1 and convex
// on all of R^6.
inline double extended_covolume(const Vec6d& l, double abs_tol = 1e-9)
{
    static const double f_origin = 16.0 * lobachevsky(std::numbers::pi / 4.0);
    return covolume_line_integral(Vec6d::Zero(), l, abs_tol) + f_origin;
}

// Hyperbolic volume of a nondegenerate hyper-ideal tetrahedron,
// V = (F(l) - sum_s a_s l_s) / 2.
inline double volume(const Vec6d& l, double abs_tol = 1e-9)
{
    if (classify(l) != Region::NonDegenerate)
        throw std::domain_error("volume: length vector is not a nondegenerate hyper-ideal tetrahedron");
    return 0.5 * (extended_covolume(l, abs_tol) - extended_angles(l).dot(l));
}

}  // namespace hyperflow
