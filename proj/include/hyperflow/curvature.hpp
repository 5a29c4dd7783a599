#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

#include "hyperflow/tet_geometry.hpp"
#include "hyperflow/triangulation.hpp"

// Per-edge-class curvature assembly on a triangulation.
//
// A metric assigns a real length to every edge class; entries may be
// nonpositive, in which case the angle extension of tet_geometry.hpp takes
// over. The curvature of an edge class is 2 pi minus the sum of the
// (extended) dihedral angles over all its (tetrahedron, slot) incidences; a
// class meeting the same tetrahedron in several slots receives one angle per
// slot, matching the degree bookkeeping.

namespace hyperflow {

using MetricVector = Eigen::VectorXd;
using CurvatureVector = Eigen::VectorXd;

// Slot-ordered copy of the six class lengths referenced by one tetrahedron.
Vec6d pull_tet_lengths(const Triangulation& tri, const MetricVector& metric, int tet);

// Extended curvature per edge class; continuous on all of R^E.
CurvatureVector extended_curvature(const Triangulation& tri, const MetricVector& metric);

struct NondegeneracyReport {
    bool nondegenerate = false;  // every entry > 0 and every tet nondegenerate
    std::vector<Region> tet_regions;
};

NondegeneracyReport survey_regions(const Triangulation& tri, const MetricVector& metric,
                                   double tol = kDegenerateTol);
bool is_nondegenerate(const Triangulation& tri, const MetricVector& metric,
                      double tol = kDegenerateTol);

// Curvature Jacobian dK/dl, assembled from the per-tetrahedron angle
// Jacobians with a sign flip and scattered through the slot-to-class map.
// Symmetric and negative definite on the nondegenerate locus. Throws
// std::domain_error if any tetrahedron is degenerate or wall-adjacent.
// The raw variant assembles unsymmetrized per-tet Jacobians.
Eigen::SparseMatrix<double> curvature_jacobian(const Triangulation& tri,
                                               const MetricVector& metric, double h_rel = 1e-6);
Eigen::SparseMatrix<double> curvature_jacobian_raw(const Triangulation& tri,
                                                   const MetricVector& metric,
                                                   double h_rel = 1e-6);

// Convex C^1 energy whose gradient is -(K(l) - target):
//
//   H(l) = sum_tets F_tet(pulled lengths) - sum_e (2 pi - target_e) l_e.
//
// With a zero target this is the energy driving the plain flow; a nonzero
// target shifts the minimizer to the metric realizing that curvature.
double energy(const Triangulation& tri, const MetricVector& metric,
              const CurvatureVector& target, double quad_tol = 1e-9);
double energy(const Triangulation& tri, const MetricVector& metric, double quad_tol = 1e-9);

}  // namespace hyperflow
