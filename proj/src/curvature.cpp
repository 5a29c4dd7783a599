#include "hyperflow/curvature.hpp"

#include <numbers>
#include <stdexcept>
#include <vector>

namespace hyperflow {

namespace {

void check_metric_size(const Triangulation& tri, const MetricVector& metric, const char* who)
{
    if (metric.size() != tri.num_edges())
        throw std::invalid_argument(std::string(who) + ": metric has " +
                                    std::to_string(metric.size()) + " entries but the triangulation has " +
                                    std::to_string(tri.num_edges()) + " edge classes");
}

}  // namespace

Vec6d pull_tet_lengths(const Triangulation& tri, const MetricVector& metric, int tet)
{
    check_metric_size(tri, metric, "pull_tet_lengths");
    Vec6d l;
    for (int s = 0; s < kNumEdgeSlots; ++s) l[s] = metric[tri.edge_class(tet, s)];
    return l;
}

CurvatureVector extended_curvature(const Triangulation& tri, const MetricVector& metric)
{
    check_metric_size(tri, metric, "extended_curvature");
    CurvatureVector curvature =
        CurvatureVector::Constant(tri.num_edges(), 2.0 * std::numbers::pi);
    for (int t = 0; t < tri.num_tets(); ++t) {
        const Vec6d angles = extended_angles(pull_tet_lengths(tri, metric, t));
        for (int s = 0; s < kNumEdgeSlots; ++s) curvature[tri.edge_class(t, s)] -= angles[s];
    }
    return curvature;
}

NondegeneracyReport survey_regions(const Triangulation& tri, const MetricVector& metric,
                                   double tol)
{
    check_metric_size(tri, metric, "survey_regions");
    NondegeneracyReport rep;
    rep.nondegenerate = (metric.array() > 0.0).all();
    rep.tet_regions.reserve(static_cast<std::size_t>(tri.num_tets()));
    for (int t = 0; t < tri.num_tets(); ++t) {
        const Region r = classify(pull_tet_lengths(tri, metric, t), tol);
        rep.tet_regions.push_back(r);
        if (r != Region::NonDegenerate) rep.nondegenerate = false;
    }
    return rep;
}

bool is_nondegenerate(const Triangulation& tri, const MetricVector& metric, double tol)
{
    return survey_regions(tri, metric, tol).nondegenerate;
}

namespace {

Eigen::SparseMatrix<double> assemble_jacobian(const Triangulation& tri,
                                              const MetricVector& metric, double h_rel,
                                              bool symmetrize)
{
    check_metric_size(tri, metric, "curvature_jacobian");
    if (!is_nondegenerate(tri, metric))
        throw std::domain_error("curvature_jacobian: metric is not nondegenerate");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(36 * tri.num_tets()));
    for (int t = 0; t < tri.num_tets(); ++t) {
        const Vec6d l = pull_tet_lengths(tri, metric, t);
        const Mat6d j = symmetrize ? angle_jacobian(l, h_rel) : angle_jacobian_raw(l, h_rel);
        for (int s = 0; s < kNumEdgeSlots; ++s)
            for (int s2 = 0; s2 < kNumEdgeSlots; ++s2)
                triplets.emplace_back(tri.edge_class(t, s), tri.edge_class(t, s2), -j(s, s2));
    }
    Eigen::SparseMatrix<double> jac(tri.num_edges(), tri.num_edges());
    jac.setFromTriplets(triplets.begin(), triplets.end());
    return jac;
}

}  // namespace

Eigen::SparseMatrix<double> curvature_jacobian(const Triangulation& tri,
                                               const MetricVector& metric, double h_rel)
{
    return assemble_jacobian(tri, metric, h_rel, true);
}

Eigen::SparseMatrix<double> curvature_jacobian_raw(const Triangulation& tri,
                                                   const MetricVector& metric, double h_rel)
{
    return assemble_jacobian(tri, metric, h_rel, false);
}

double energy(const Triangulation& tri, const MetricVector& metric,
              const CurvatureVector& target, double quad_tol)
{
    check_metric_size(tri, metric, "energy");
    if (target.size() != metric.size())
        throw std::invalid_argument("energy: target curvature has the wrong dimension");
    double value = 0.0;
    const double tet_tol = quad_tol / std::max(1, tri.num_tets());
    for (int t = 0; t < tri.num_tets(); ++t)
        value += extended_covolume(pull_tet_lengths(tri, metric, t), tet_tol);
    for (int e = 0; e < tri.num_edges(); ++e)
        value -= (2.0 * std::numbers::pi - target[e]) * metric[e];
    return value;
}

double energy(const Triangulation& tri, const MetricVector& metric, double quad_tol)
{
    return energy(tri, metric, CurvatureVector::Zero(tri.num_edges()), quad_tol);
}

}  // namespace hyperflow
