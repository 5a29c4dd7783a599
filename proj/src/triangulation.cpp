#include "hyperflow/triangulation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "hyperflow/edge_slots.hpp"

namespace hyperflow {

namespace {

// Union-find over small index sets.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

// Full vertex map of a gluing on the three source-face vertices.
std::array<int, 4> gluing_vertex_map(const FaceGluing& g)
{
    std::array<int, 4> map{-1, -1, -1, -1};
    const std::array<int, 3> src = face_vertices(g.src_face);
    for (int k = 0; k < 3; ++k) map[static_cast<std::size_t>(src[static_cast<std::size_t>(k)])] = g.image[static_cast<std::size_t>(k)];
    return map;
}

bool is_identity_self_gluing(const FaceGluing& g)
{
    return g.src_tet == g.dst_tet && g.src_face == g.dst_face &&
           g.image == face_vertices(g.src_face);
}

FaceGluing inverse_gluing(const FaceGluing& g)
{
    FaceGluing inv;
    inv.src_tet = g.dst_tet;
    inv.src_face = g.dst_face;
    inv.dst_tet = g.src_tet;
    inv.dst_face = g.src_face;
    const std::array<int, 4> map = gluing_vertex_map(g);
    const std::array<int, 3> dst = face_vertices(g.dst_face);
    const std::array<int, 3> src = face_vertices(g.src_face);
    for (int k = 0; k < 3; ++k) {
        for (int m = 0; m < 3; ++m)
            if (map[static_cast<std::size_t>(src[static_cast<std::size_t>(m)])] == dst[static_cast<std::size_t>(k)])
                inv.image[static_cast<std::size_t>(k)] = src[static_cast<std::size_t>(m)];
    }
    return inv;
}

bool same_gluing(const FaceGluing& a, const FaceGluing& b)
{
    return a.src_tet == b.src_tet && a.src_face == b.src_face && a.dst_tet == b.dst_tet &&
           a.dst_face == b.dst_face && a.image == b.image;
}

void check_gluing_shape(int num_tets, const FaceGluing& g)
{
    auto in_range = [&](int t, int f) { return t >= 0 && t < num_tets && f >= 0 && f <= 3; };
    if (!in_range(g.src_tet, g.src_face) || !in_range(g.dst_tet, g.dst_face))
        throw std::invalid_argument("gluing references a tetrahedron or face out of range");
    const std::array<int, 3> dst = face_vertices(g.dst_face);
    std::array<int, 3> img = g.image;
    std::sort(img.begin(), img.end());
    if (img != dst)
        throw std::invalid_argument("gluing image is not a permutation of the target face's vertices");
    if (is_identity_self_gluing(g))
        throw std::invalid_argument("face glued to itself with the identity vertex map");
}

}  // namespace

std::array<int, 3> face_vertices(int f)
{
    std::array<int, 3> v{};
    int n = 0;
    for (int w = 0; w < 4; ++w)
        if (w != f) v[static_cast<std::size_t>(n++)] = w;
    return v;
}

Triangulation Triangulation::from_gluings(int num_tets, const std::vector<FaceGluing>& gluings)
{
    if (num_tets <= 0) throw std::invalid_argument("triangulation needs at least one tetrahedron");

    Triangulation tri;
    tri.format_ = Format::gluing;
    tri.num_tets_ = num_tets;

    // Normalize: keep one record per unordered face pair, smaller face first;
    // accept redundant reverse records only if exactly inverse.
    std::map<std::pair<int, int>, FaceGluing> by_face;
    for (const FaceGluing& g : gluings) {
        check_gluing_shape(num_tets, g);
        const auto src_key = std::make_pair(g.src_tet, g.src_face);
        const auto dst_key = std::make_pair(g.dst_tet, g.dst_face);
        const FaceGluing inv = inverse_gluing(g);
        for (const auto& [key, rec] : {std::make_pair(src_key, g), std::make_pair(dst_key, inv)}) {
            auto it = by_face.find(key);
            if (it == by_face.end()) {
                by_face.emplace(key, rec);
            } else if (!same_gluing(it->second, rec)) {
                throw std::invalid_argument(
                    "face (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                    ") is glued twice (or a redundant reverse record is not the inverse)");
            }
        }
        if (g.src_tet == g.dst_tet && g.src_face == g.dst_face) tri.has_self_gluing_ = true;
    }
    for (const auto& [key, rec] : by_face) {
        if (std::make_pair(rec.src_tet, rec.src_face) <= std::make_pair(rec.dst_tet, rec.dst_face))
            tri.gluings_.push_back(rec);
    }

    tri.build_edge_classes();
    tri.build_boundary_links();
    return tri;
}

Triangulation Triangulation::from_incidence(const std::vector<std::array<int, 6>>& tet_edges,
                                            int num_edges)
{
    if (tet_edges.empty()) throw std::invalid_argument("triangulation needs at least one tetrahedron");
    if (num_edges <= 0) throw std::invalid_argument("edge class count must be positive");

    Triangulation tri;
    tri.format_ = Format::incidence;
    tri.num_tets_ = static_cast<int>(tet_edges.size());
    tri.tet_edges_ = tet_edges;
    tri.members_.assign(static_cast<std::size_t>(num_edges), {});
    for (int t = 0; t < tri.num_tets_; ++t) {
        for (int s = 0; s < kNumEdgeSlots; ++s) {
            const int e = tet_edges[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
            if (e < 0 || e >= num_edges)
                throw std::invalid_argument("edge label out of range: e" + std::to_string(e));
            tri.members_[static_cast<std::size_t>(e)].emplace_back(t, s);
        }
    }
    for (int e = 0; e < num_edges; ++e)
        if (tri.members_[static_cast<std::size_t>(e)].empty())
            throw std::invalid_argument("edge label gap: e" + std::to_string(e) + " is never used");
    return tri;
}

void Triangulation::build_edge_classes()
{
    const int n = 6 * num_tets_;
    UnionFind uf(n);
    auto id = [](int tet, int slot) { return 6 * tet + slot; };
    for (const FaceGluing& g : gluings_) {
        const std::array<int, 4> map = gluing_vertex_map(g);
        const std::array<int, 3> src = face_vertices(g.src_face);
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const int p = src[static_cast<std::size_t>(a)], q = src[static_cast<std::size_t>(b)];
                uf.unite(id(g.src_tet, slot_of(p, q)),
                         id(g.dst_tet, slot_of(map[static_cast<std::size_t>(p)], map[static_cast<std::size_t>(q)])));
            }
    }
    // labels in first-encounter order
    std::map<int, int> label;
    tet_edges_.assign(static_cast<std::size_t>(num_tets_), {});
    for (int t = 0; t < num_tets_; ++t)
        for (int s = 0; s < kNumEdgeSlots; ++s) {
            const int root = uf.find(id(t, s));
            auto [it, inserted] = label.emplace(root, static_cast<int>(label.size()));
            const int e = it->second;
            tet_edges_[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] = e;
            if (inserted) members_.emplace_back();
            members_[static_cast<std::size_t>(e)].emplace_back(t, s);
        }
}

// Assemble the boundary surfaces from the vertex links. Each tetrahedron
// corner (t, v) contributes one triangle; its side lying in face f is glued
// to the side of corner (t', mu(v)) in face f'. Link vertices are the orbits
// of directed tetrahedron edges (t, v -> u) under the gluing maps. Euler
// characteristics are computed per connected component of the link surface.
void Triangulation::build_boundary_links()
{
    // chi needs every face glued and no face glued to itself (a self-gluing
    // pins a link side to itself and the quotient is no longer a surface).
    std::vector<bool> glued(static_cast<std::size_t>(4 * num_tets_), false);
    for (const FaceGluing& g : gluings_) {
        glued[static_cast<std::size_t>(4 * g.src_tet + g.src_face)] = true;
        glued[static_cast<std::size_t>(4 * g.dst_tet + g.dst_face)] = true;
    }
    if (has_self_gluing_ || !std::all_of(glued.begin(), glued.end(), [](bool b) { return b; })) {
        chi_available_ = false;
        return;
    }

    const int corners = 4 * num_tets_;
    auto corner_id = [](int t, int v) { return 4 * t + v; };
    // directed edge (t, v -> u), v != u
    auto dir_id = [&](int t, int v, int u) { return 12 * t + 3 * v + (u > v ? u - 1 : u); };

    UnionFind corner_uf(corners);
    UnionFind dir_uf(12 * num_tets_);
    for (const FaceGluing& g : gluings_) {
        const std::array<int, 4> map = gluing_vertex_map(g);
        for (int v : face_vertices(g.src_face)) {
            corner_uf.unite(corner_id(g.src_tet, v), corner_id(g.dst_tet, map[static_cast<std::size_t>(v)]));
            for (int u : face_vertices(g.src_face)) {
                if (u == v) continue;
                dir_uf.unite(dir_id(g.src_tet, v, u),
                             dir_id(g.dst_tet, map[static_cast<std::size_t>(v)], map[static_cast<std::size_t>(u)]));
            }
        }
    }

    // per component: F = corners, E = side pairs (3F/2), V = directed-edge orbits
    std::map<int, int> comp_index;
    for (int c = 0; c < corners; ++c) {
        const int root = corner_uf.find(c);
        comp_index.emplace(root, static_cast<int>(comp_index.size()));
    }
    std::vector<int> faces(comp_index.size(), 0);
    std::vector<int> verts(comp_index.size(), 0);
    for (int c = 0; c < corners; ++c)
        ++faces[static_cast<std::size_t>(comp_index[corner_uf.find(c)])];
    for (int t = 0; t < num_tets_; ++t)
        for (int v = 0; v < 4; ++v)
            for (int u = 0; u < 4; ++u) {
                if (u == v) continue;
                if (dir_uf.find(dir_id(t, v, u)) == dir_id(t, v, u))
                    ++verts[static_cast<std::size_t>(comp_index[corner_uf.find(corner_id(t, v))])];
            }

    boundary_chi_.clear();
    for (std::size_t k = 0; k < comp_index.size(); ++k) {
        const int F = faces[k];
        const int E = 3 * F / 2;
        boundary_chi_.push_back(verts[k] - E + F);
    }
    chi_available_ = true;
}

const std::vector<int>& Triangulation::boundary_chi() const
{
    if (!chi_available_)
        throw std::logic_error(
            "boundary Euler characteristics are unavailable (incidence format or self-glued face)");
    return boundary_chi_;
}

int Triangulation::max_degree() const
{
    int d = 0;
    for (int e = 0; e < num_edges(); ++e) d = std::max(d, degree(e));
    return d;
}

ValidationReport Triangulation::validate(bool strict) const
{
    ValidationReport rep;
    for (int e = 0; e < num_edges(); ++e) ++rep.degree_histogram[degree(e)];

    // partition identity: sum of degrees = 6 * num_tets
    long long total = 0;
    for (int e = 0; e < num_edges(); ++e) total += degree(e);
    if (total != 6LL * num_tets_)
        rep.violations.push_back({"degree-partition",
                                  "sum of edge degrees " + std::to_string(total) + " != 6 * " +
                                      std::to_string(num_tets_)});

    if (format_ == Format::gluing) {
        std::vector<int> seen(static_cast<std::size_t>(4 * num_tets_), 0);
        for (const FaceGluing& g : gluings_) {
            ++seen[static_cast<std::size_t>(4 * g.src_tet + g.src_face)];
            ++seen[static_cast<std::size_t>(4 * g.dst_tet + g.dst_face)];
        }
        for (int t = 0; t < num_tets_; ++t)
            for (int f = 0; f < 4; ++f) {
                const int n = seen[static_cast<std::size_t>(4 * t + f)];
                if (n == 0)
                    rep.violations.push_back({"unmatched-face", "tet " + std::to_string(t) +
                                                                    " face " + std::to_string(f) +
                                                                    " is not glued"});
                else if (n > 1)
                    rep.violations.push_back({"face-glued-twice", "tet " + std::to_string(t) +
                                                                      " face " + std::to_string(f) +
                                                                      " appears in several gluings"});
            }
        for (const FaceGluing& g : gluings_) {
            const FaceGluing inv2 = inverse_gluing(inverse_gluing(g));
            if (!same_gluing(g, inv2))
                rep.violations.push_back({"non-involutive", "gluing of tet " +
                                                                std::to_string(g.src_tet) + " face " +
                                                                std::to_string(g.src_face)});
        }
        if (has_self_gluing_)
            rep.advisories.push_back({"self-gluing",
                                      "a face is glued to itself; boundary surfaces are not "
                                      "computed for this pseudo-manifold-style input"});
    }

    if (chi_available_) {
        for (std::size_t k = 0; k < boundary_chi_.size(); ++k) {
            if (boundary_chi_[k] >= 0) {
                ValidationIssue issue{"boundary-chi",
                                      "boundary component " + std::to_string(k) + " has chi = " +
                                          std::to_string(boundary_chi_[k]) +
                                          "; chi(S) < 0 required"};
                if (strict)
                    rep.violations.push_back(issue);
                else
                    rep.advisories.push_back(issue);
            }
        }
    } else {
        rep.advisories.push_back({"boundary-chi",
                                  format_ == Format::incidence
                                      ? "unavailable (incidence format)"
                                      : "unavailable (incomplete or self-glued face pairing)"});
    }

    if (max_degree() <= 6)
        rep.advisories.push_back({"degree-bound",
                                  "every edge degree is <= 6: no zero-curvature metric exists on "
                                  "this triangulation"});

    rep.ok = rep.violations.empty();
    return rep;
}

namespace {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text)
{
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line line{number, {}};
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

int parse_int(const Line& line, const std::string& tok, const char* what)
{
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(line.number, std::string("expected ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size())
        throw ParseError(line.number, std::string("expected ") + what + ", got '" + tok + "'");
    return value;
}

int parse_edge_label(const Line& line, const std::string& tok)
{
    if (tok.size() < 2 || tok[0] != 'e')
        throw ParseError(line.number, "expected an edge label like 'e0', got '" + tok + "'");
    return parse_int(line, tok.substr(1), "an edge index");
}

}  // namespace

Triangulation parse_gluing(const std::string& text)
{
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty()) throw ParseError(0, "empty input");
    const Line& header = lines.front();
    if (header.tokens.size() != 2 || header.tokens[0] != "tets")
        throw ParseError(header.number, "expected header 'tets N'");
    const int num_tets = parse_int(header, header.tokens[1], "a tetrahedron count");
    if (num_tets <= 0) throw ParseError(header.number, "tetrahedron count must be positive");

    std::vector<FaceGluing> gluings;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& line = lines[i];
        // glue t f -> t' f' : p q r
        if (line.tokens.size() != 10 || line.tokens[0] != "glue" || line.tokens[3] != "->" ||
            line.tokens[6] != ":")
            throw ParseError(line.number, "expected 'glue t f -> t' f' : p q r'");
        FaceGluing g;
        g.src_tet = parse_int(line, line.tokens[1], "a tetrahedron index");
        g.src_face = parse_int(line, line.tokens[2], "a face index");
        g.dst_tet = parse_int(line, line.tokens[4], "a tetrahedron index");
        g.dst_face = parse_int(line, line.tokens[5], "a face index");
        for (int k = 0; k < 3; ++k)
            g.image[static_cast<std::size_t>(k)] = parse_int(line, line.tokens[static_cast<std::size_t>(7 + k)], "a vertex");
        try {
            check_gluing_shape(num_tets, g);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
        gluings.push_back(g);
    }

    Triangulation tri;
    try {
        tri = Triangulation::from_gluings(num_tets, gluings);
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
    // the file dialect requires a closed pairing
    std::vector<bool> glued(static_cast<std::size_t>(4 * num_tets), false);
    for (const FaceGluing& g : tri.gluings()) {
        glued[static_cast<std::size_t>(4 * g.src_tet + g.src_face)] = true;
        glued[static_cast<std::size_t>(4 * g.dst_tet + g.dst_face)] = true;
    }
    for (int t = 0; t < num_tets; ++t)
        for (int f = 0; f < 4; ++f)
            if (!glued[static_cast<std::size_t>(4 * t + f)])
                throw ParseError(0, "unmatched face: tet " + std::to_string(t) + " face " +
                                        std::to_string(f));
    return tri;
}

Triangulation parse_incidence(const std::string& text)
{
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty()) throw ParseError(0, "empty input");
    const Line& header = lines.front();
    if (header.tokens.size() != 2 || header.tokens[0] != "edges")
        throw ParseError(header.number, "expected header 'edges M'");
    const int num_edges = parse_int(header, header.tokens[1], "an edge-class count");
    if (num_edges <= 0) throw ParseError(header.number, "edge-class count must be positive");

    std::map<int, std::array<int, 6>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& line = lines[i];
        // tet i: e_a e_b e_c e_d e_e e_f
        if (line.tokens.size() != 8 || line.tokens[0] != "tet" || line.tokens[1].back() != ':')
            throw ParseError(line.number, "expected 'tet i: e.. e.. e.. e.. e.. e..'");
        const int t = parse_int(line, line.tokens[1].substr(0, line.tokens[1].size() - 1),
                                "a tetrahedron index");
        if (rows.count(t)) throw ParseError(line.number, "duplicate tetrahedron " + std::to_string(t));
        std::array<int, 6> row{};
        for (int s = 0; s < kNumEdgeSlots; ++s) {
            const int e = parse_edge_label(line, line.tokens[static_cast<std::size_t>(2 + s)]);
            if (e < 0 || e >= num_edges)
                throw ParseError(line.number, "edge label e" + std::to_string(e) +
                                                  " out of range [0, " + std::to_string(num_edges) +
                                                  ")");
            row[static_cast<std::size_t>(s)] = e;
        }
        rows.emplace(t, row);
    }
    if (rows.empty()) throw ParseError(0, "no tetrahedra");
    std::vector<std::array<int, 6>> tet_edges;
    for (const auto& [t, row] : rows) {
        if (t != static_cast<int>(tet_edges.size()))
            throw ParseError(0, "tetrahedron indices must be 0..T-1 with no gaps (missing tet " +
                                    std::to_string(tet_edges.size()) + ")");
        tet_edges.push_back(row);
    }
    try {
        return Triangulation::from_incidence(tet_edges, num_edges);
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
}

Triangulation parse_triangulation(const std::string& text)
{
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty()) throw ParseError(0, "empty input");
    const std::string& head = lines.front().tokens.front();
    if (head == "tets") return parse_gluing(text);
    if (head == "edges") return parse_incidence(text);
    throw ParseError(lines.front().number, "unknown header '" + head + "' (expected 'tets' or 'edges')");
}

std::string write_gluing(const Triangulation& tri)
{
    if (tri.format() != Triangulation::Format::gluing)
        throw std::logic_error("write_gluing: triangulation was not built from gluings");
    std::ostringstream out;
    out << "tets " << tri.num_tets() << "\n";
    for (const FaceGluing& g : tri.gluings()) {
        out << "glue " << g.src_tet << " " << g.src_face << " -> " << g.dst_tet << " "
            << g.dst_face << " : " << g.image[0] << " " << g.image[1] << " " << g.image[2] << "\n";
    }
    return out.str();
}

std::string write_incidence(const Triangulation& tri)
{
    std::ostringstream out;
    out << "edges " << tri.num_edges() << "\n";
    for (int t = 0; t < tri.num_tets(); ++t) {
        out << "tet " << t << ":";
        for (int s = 0; s < kNumEdgeSlots; ++s) out << " e" << tri.edge_class(t, s);
        out << "\n";
    }
    return out.str();
}

}  // namespace hyperflow
