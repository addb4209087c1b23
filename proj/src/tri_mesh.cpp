#include "lawson/tri_mesh.hpp"

#include "lawson/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace lawson {

bool VertexTag::on_arc(int a) const {
    if (kind == Kind::Arc) {
        return id == a;
    }
    if (kind == Kind::Corner) {
        return id == a || (id + 3) % 4 == a;
    }
    return false;
}

double triangle_area(const Vec4& a, const Vec4& b, const Vec4& c) {
    const Vec4 u = b - a;
    const Vec4 v = c - a;
    const double uu = u.squaredNorm();
    const double vv = v.squaredNorm();
    const double uv = u.dot(v);
    return 0.5 * std::sqrt(std::max(0.0, uu * vv - uv * uv));
}

double face_area(const TriMesh& mesh, std::size_t f) {
    const Face& t = mesh.faces[f];
    return triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
}

double total_area(const TriMesh& mesh) {
    double s = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        s += face_area(mesh, f);
    }
    return s;
}

std::vector<double> dual_areas(const TriMesh& mesh) {
    std::vector<double> a(mesh.vertices.size(), 0.0);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const double third = face_area(mesh, f) / 3.0;
        for (int v : mesh.faces[f]) {
            a[v] += third;
        }
    }
    return a;
}

std::vector<std::pair<int, int>> unique_edges(const TriMesh& mesh) {
    std::vector<std::pair<int, int>> e;
    e.reserve(mesh.faces.size() * 3);
    for (const Face& t : mesh.faces) {
        for (int c = 0; c < 3; ++c) {
            const int a = t[c];
            const int b = t[(c + 1) % 3];
            e.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh) {
    std::vector<std::vector<int>> nb(mesh.vertices.size());
    for (const auto& [a, b] : unique_edges(mesh)) {
        nb[a].push_back(b);
        nb[b].push_back(a);
    }
    for (auto& l : nb) {
        std::sort(l.begin(), l.end());
    }
    return nb;
}

double corner_angle(const TriMesh& mesh, std::size_t f, int c) {
    const Face& t = mesh.faces[f];
    const Vec4 u = mesh.vertices[t[(c + 1) % 3]] - mesh.vertices[t[c]];
    const Vec4 v = mesh.vertices[t[(c + 2) % 3]] - mesh.vertices[t[c]];
    const double uu = u.squaredNorm();
    const double vv = v.squaredNorm();
    const double uv = u.dot(v);
    return std::atan2(std::sqrt(std::max(0.0, uu * vv - uv * uv)), uv);
}

std::array<double, 3> stereographic(const Vec4& x, const Vec4& pole) {
    // Orthonormal frame of pole^perp: Gram-Schmidt on the standard basis.
    std::array<Vec4, 3> frame;
    int filled = 0;
    for (int i = 0; i < 4 && filled < 3; ++i) {
        Vec4 e = Vec4::Unit(i);
        e -= pole.dot(e) * pole;
        for (int j = 0; j < filled; ++j) {
            e -= frame[j].dot(e) * frame[j];
        }
        if (e.norm() > 1e-6) {
            frame[filled++] = e.normalized();
        }
    }
    const double denom = 1.0 - x.dot(pole);
    return {frame[0].dot(x) / denom, frame[1].dot(x) / denom, frame[2].dot(x) / denom};
}

namespace {

void write_comments(std::ostream& os, const OffHeader& header) {
    for (const auto& c : header.comments) {
        os << "# " << c << '\n';
    }
}

} // namespace

void write_off4(std::ostream& os, const TriMesh& mesh, const OffHeader& header) {
    os << "4OFF\n";
    write_comments(os, header);
    os << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    os << std::setprecision(17);
    for (const Vec4& v : mesh.vertices) {
        os << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << '\n';
    }
    for (const Face& t : mesh.faces) {
        os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
}

TriMesh read_off4(std::istream& is, std::vector<std::string>* comments) {
    auto next_line = [&](std::string& line) {
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] == '#') {
                if (comments != nullptr) {
                    comments->push_back(line.size() > 2 ? line.substr(2) : std::string());
                }
                continue;
            }
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line) || line.rfind("4OFF", 0) != 0) {
        throw InputError("read_off4: missing 4OFF magic");
    }
    if (!next_line(line)) {
        throw InputError("read_off4: missing counts line");
    }
    std::istringstream counts(line);
    std::size_t nv = 0, nf = 0;
    if (!(counts >> nv >> nf)) {
        throw InputError("read_off4: malformed counts line");
    }
    TriMesh mesh;
    mesh.vertices.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!next_line(line)) {
            throw InputError("read_off4: truncated vertex block");
        }
        std::istringstream ls(line);
        Vec4& v = mesh.vertices[i];
        if (!(ls >> v[0] >> v[1] >> v[2] >> v[3])) {
            throw InputError("read_off4: malformed vertex line");
        }
    }
    mesh.faces.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        if (!next_line(line)) {
            throw InputError("read_off4: truncated face block");
        }
        std::istringstream ls(line);
        int n = 0;
        Face& t = mesh.faces[i];
        if (!(ls >> n >> t[0] >> t[1] >> t[2]) || n != 3) {
            throw InputError("read_off4: only triangles are supported");
        }
        for (int v : t) {
            if (v < 0 || static_cast<std::size_t>(v) >= nv) {
                throw InputError("read_off4: face index out of range");
            }
        }
    }
    return mesh;
}

void write_off_stereo(std::ostream& os, const TriMesh& mesh, const Vec4& pole,
                      const OffHeader& header, const std::vector<ScalarField>& fields) {
    os << "OFF\n";
    write_comments(os, header);
    os << "# stereographic projection from pole " << std::setprecision(17) << pole[0] << ' '
       << pole[1] << ' ' << pole[2] << ' ' << pole[3] << '\n';
    for (const Vec4& v : mesh.vertices) {
        os << "# v4 " << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << '\n';
    }
    os << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    for (const Vec4& v : mesh.vertices) {
        const auto p = stereographic(v, pole);
        os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    }
    for (const Face& t : mesh.faces) {
        os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    for (const ScalarField& f : fields) {
        os << "# field " << f.name << ' ' << f.values.size() << '\n';
        for (double x : f.values) {
            os << "# " << x << '\n';
        }
    }
}

void write_obj_stereo(std::ostream& os, const TriMesh& mesh, const Vec4& pole,
                      const OffHeader& header) {
    write_comments(os, header);
    os << std::setprecision(17);
    for (const Vec4& v : mesh.vertices) {
        os << "# v4 " << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << '\n';
    }
    for (const Vec4& v : mesh.vertices) {
        const auto p = stereographic(v, pole);
        os << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    }
    for (const Face& t : mesh.faces) {
        os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

} // namespace lawson
