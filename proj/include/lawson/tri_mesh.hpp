#pragma once

#include "lawson/sphere_geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lawson {

/// Boundary role of a patch vertex. Arc ids 0..3 stand for gamma_1..gamma_4,
/// corner ids 0..3 for P1, Q1, P2, Q2 (corner c joins arcs c-1 and c).
struct VertexTag {
    enum class Kind : std::uint8_t { Interior, Arc, Corner };
    Kind kind = Kind::Interior;
    int id = -1;

    static VertexTag interior() { return {}; }
    static VertexTag arc(int a) { return {Kind::Arc, a}; }
    static VertexTag corner(int c) { return {Kind::Corner, c}; }
    bool on_arc(int a) const;
    bool operator==(const VertexTag&) const = default;
};

using Face = std::array<int, 3>;

/// Triangulated surface with vertices on S^3. Patches carry boundary tags and
/// the great circles their boundary slides on; closed surfaces leave both empty.
struct TriMesh {
    std::vector<Vec4> vertices;
    std::vector<Face> faces;
    std::vector<VertexTag> tags;  // empty for closed surfaces
    std::vector<GreatCircle> arcs;  // 4 entries for patches
    int resolution = 0;
    LawsonParams params;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
    bool is_patch() const { return !tags.empty(); }
};

double triangle_area(const Vec4& a, const Vec4& b, const Vec4& c);
double face_area(const TriMesh& mesh, std::size_t f);
double total_area(const TriMesh& mesh);
/// Barycentric dual area: one third of the incident triangle areas.
std::vector<double> dual_areas(const TriMesh& mesh);

/// Undirected edges (i < j), sorted.
std::vector<std::pair<int, int>> unique_edges(const TriMesh& mesh);

/// Vertex adjacency lists (sorted, no duplicates).
std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh);

/// Interior angle (radians) of face f at its local corner c.
double corner_angle(const TriMesh& mesh, std::size_t f, int c);

/// Stereographic projection to R^3 from `pole`.
std::array<double, 3> stereographic(const Vec4& x, const Vec4& pole);

struct OffHeader {
    std::vector<std::string> comments;  // written as "# ..." lines after the counts line
};

/// OFF with 4-component vertex lines ("4OFF") so the sphere coordinates
/// survive a round trip; comments carry run metadata.
void write_off4(std::ostream& os, const TriMesh& mesh, const OffHeader& header);
/// Reads back a file written by write_off4 (comments are returned, tags are not).
TriMesh read_off4(std::istream& is, std::vector<std::string>* comments = nullptr);

/// Viewer OFF: 3-D stereographic body, 4-D coordinates preserved in "# v4" comments,
/// optional scalar fields appended as "# field <name>" blocks.
struct ScalarField {
    std::string name;
    std::vector<double> values;
};
void write_off_stereo(std::ostream& os, const TriMesh& mesh, const Vec4& pole,
                      const OffHeader& header, const std::vector<ScalarField>& fields = {});
void write_obj_stereo(std::ostream& os, const TriMesh& mesh, const Vec4& pole,
                      const OffHeader& header);

} // namespace lawson
