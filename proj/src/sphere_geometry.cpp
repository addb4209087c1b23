#include "lawson/sphere_geometry.hpp"

#include "lawson/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lawson {

SpherePoint::SpherePoint(const Vec4& x, double drift) {
    const double n = x.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > drift) {
        throw InputError("SpherePoint: vector of norm " + std::to_string(n) + " is not on S^3");
    }
    x_ = x / n;
}

SpherePoint SpherePoint::normalized(const Vec4& x) {
    const double n = x.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InputError("SpherePoint::normalized: zero or non-finite vector");
    }
    return SpherePoint(Vec4(x / n));
}

GreatCircle GreatCircle::through(const SpherePoint& a, const SpherePoint& b) {
    Vec4 w = b.vec() - a.vec().dot(b.vec()) * a.vec();
    const double n = w.norm();
    if (n < 1e-12) {
        throw InputError("GreatCircle::through: points coincide or are antipodal");
    }
    return GreatCircle{a.vec(), w / n};
}

GreatCircle GreatCircle::from_basis(const Vec4& u, const Vec4& v) {
    if (std::abs(u.norm() - 1.0) > 1e-8 || std::abs(v.norm() - 1.0) > 1e-8 ||
        std::abs(u.dot(v)) > 1e-8) {
        throw InputError("GreatCircle::from_basis: basis is not orthonormal");
    }
    Vec4 uu = u.normalized();
    Vec4 vv = v - uu.dot(v) * uu;
    return GreatCircle{uu, vv.normalized()};
}

Vec4 GreatCircle::tangent_at(const Vec4& x) const {
    Vec4 t = u.dot(x) * v - v.dot(x) * u;
    return t.normalized();
}

Mat4 GreatCircle::reflection_matrix() const {
    return 2.0 * (u * u.transpose() + v * v.transpose()) - Mat4::Identity();
}

LawsonParams::LawsonParams(int m_, int k_) : m(m_), k(k_) {
    if (m < 1 || k < 1) {
        throw InputError("LawsonParams: m and k must be positive integers");
    }
}

double LawsonParams::beta() const { return std::numbers::pi / (m + 1); }
double LawsonParams::theta() const { return std::numbers::pi / (k + 1); }

namespace {
int wrap(int i, int n) { return ((i - 1) % n + n) % n; }
} // namespace

const SpherePoint& LawsonVertices::P(int i) const { return p[wrap(i, static_cast<int>(p.size()))]; }
const SpherePoint& LawsonVertices::Q(int j) const { return q[wrap(j, static_cast<int>(q.size()))]; }

SpherePoint geodesic_point(const SpherePoint& p, const Vec4& tangent, double t,
                           const Tolerances& tol) {
    const double off = std::abs(p.vec().dot(tangent));
    const double unit = std::abs(tangent.norm() - 1.0);
    if (!std::isfinite(off) || off > tol.tangent_repair || unit > tol.tangent_repair) {
        throw InputError("geodesic_point: tangent is not a unit vector orthogonal to p");
    }
    Vec4 v = tangent - p.vec().dot(tangent) * p.vec();
    v.normalize();
    return SpherePoint::normalized(std::cos(t) * p.vec() + std::sin(t) * v);
}

SpherePoint reflect(const GreatCircle& gamma, const SpherePoint& x) {
    return SpherePoint::normalized(2.0 * gamma.project_to_plane(x.vec()) - x.vec());
}

double sphere_distance(const Vec4& x, const Vec4& y) {
    return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

double sphere_distance(const SpherePoint& x, const SpherePoint& y) {
    return sphere_distance(x.vec(), y.vec());
}

LawsonVertices lawson_vertices(const LawsonParams& params) {
    LawsonVertices out;
    const double beta = params.beta();
    const double theta = params.theta();
    for (int i = 1; i <= 2 * params.m + 2; ++i) {
        const double a = (i - 1) * beta;
        out.p.emplace_back(Vec4(0.0, 0.0, std::sin(a), std::cos(a)));
    }
    for (int j = 1; j <= 2 * params.k + 2; ++j) {
        const double a = (j - 1) * theta;
        out.q.emplace_back(Vec4(std::sin(a), std::cos(a), 0.0, 0.0));
    }
    return out;
}

std::array<GeodesicArc, 4> fundamental_quadrilateral(const LawsonParams& params) {
    const LawsonVertices lv = lawson_vertices(params);
    const std::array<SpherePoint, 4> corners{lv.P(1), lv.Q(1), lv.P(2), lv.Q(2)};
    std::array<GeodesicArc, 4> arcs;
    for (int e = 0; e < 4; ++e) {
        const SpherePoint& a = corners[e];
        const SpherePoint& b = corners[(e + 1) % 4];
        arcs[e] = GeodesicArc{a, b, sphere_distance(a, b), GreatCircle::through(a, b)};
    }
    return arcs;
}

Vec4 slerp(const Vec4& a, const Vec4& b, double s) {
    const double omega = sphere_distance(a, b);
    if (omega < 1e-14) {
        return a;
    }
    if (std::numbers::pi - omega < 1e-12) {
        throw InputError("slerp: antipodal endpoints");
    }
    const double so = std::sin(omega);
    Vec4 r = (std::sin((1.0 - s) * omega) / so) * a + (std::sin(s * omega) / so) * b;
    return r.normalized();
}

} // namespace lawson
