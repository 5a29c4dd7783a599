#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyperflow {

// A face of a tetrahedron is named by its opposite vertex: face f is the
// triangle on vertices {0,1,2,3} \ {f}, listed in ascending order.
//
// A gluing identifies two faces through a bijection of their vertices.
// `image[k]` is the destination vertex that the k-th (ascending) vertex of
// the source face maps to; the image must be a permutation of the
// destination face's vertex set.
struct FaceGluing {
    int src_tet = 0;
    int src_face = 0;
    int dst_tet = 0;
    int dst_face = 0;
    std::array<int, 3> image{};
};

// Ascending vertex triple of face f.
std::array<int, 3> face_vertices(int f);

struct ValidationIssue {
    std::string rule;
    std::string detail;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> violations;
    std::vector<ValidationIssue> advisories;
    std::map<int, int> degree_histogram;
    bool chi_available = false;
    std::vector<int> boundary_chi;  // per boundary component, when available
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line_number, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
          line(line_number)
    {
    }
    int line;
};

// An ideal triangulation: tetrahedra whose edges are partitioned into edge
// classes. Built either from face gluings (full manifold structure; edge
// classes are the orbits of tetrahedron edges under the gluing maps, and the
// boundary surfaces can be assembled from the vertex links) or directly from
// per-tetrahedron edge-class labels (abstract incidence; enough for
// curvature and flow, no boundary topology). Immutable after construction.
class Triangulation {
public:
    enum class Format { gluing, incidence };

    // `gluings` must pair mutually distinct faces (one entry per face pair;
    // a redundant reverse entry is accepted if it is the exact inverse).
    static Triangulation from_gluings(int num_tets, const std::vector<FaceGluing>& gluings);

    // `tet_edges[t][s]` is the edge-class label of slot s of tetrahedron t;
    // labels must be exactly 0..num_edges-1 with no gaps.
    static Triangulation from_incidence(const std::vector<std::array<int, 6>>& tet_edges,
                                        int num_edges);

    Format format() const { return format_; }
    int num_tets() const { return num_tets_; }
    int num_edges() const { return static_cast<int>(members_.size()); }
    int edge_class(int tet, int slot) const { return tet_edges_[static_cast<std::size_t>(tet)][static_cast<std::size_t>(slot)]; }
    const std::array<int, 6>& tet_classes(int tet) const { return tet_edges_[static_cast<std::size_t>(tet)]; }
    int degree(int edge) const { return static_cast<int>(members_[static_cast<std::size_t>(edge)].size()); }
    // (tet, slot) incidences of an edge class, in traversal order.
    const std::vector<std::pair<int, int>>& members(int edge) const { return members_[static_cast<std::size_t>(edge)]; }
    const std::vector<FaceGluing>& gluings() const { return gluings_; }
    int max_degree() const;

    bool chi_available() const { return chi_available_; }
    // Euler characteristic per boundary component (gluing format only).
    const std::vector<int>& boundary_chi() const;

    // Aggregate structural checks; chi < 0 is enforced only in strict mode.
    ValidationReport validate(bool strict) const;

private:
    Format format_ = Format::incidence;
    int num_tets_ = 0;
    std::vector<FaceGluing> gluings_;
    std::vector<std::array<int, 6>> tet_edges_;
    std::vector<std::vector<std::pair<int, int>>> members_;
    bool chi_available_ = false;
    std::vector<int> boundary_chi_;
    bool has_self_gluing_ = false;

    void build_edge_classes();
    void build_boundary_links();
};

// Parse either dialect, deciding by the header token ("tets" or "edges").
Triangulation parse_triangulation(const std::string& text);
Triangulation parse_gluing(const std::string& text);
Triangulation parse_incidence(const std::string& text);

std::string write_gluing(const Triangulation& tri);
std::string write_incidence(const Triangulation& tri);

}  // namespace hyperflow
