#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace lawson {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Tolerances {
    double exact = 1e-10;          // exact-formula checks
    double tangent_repair = 1e-8;  // drift accepted and repaired by Gram-Schmidt
};

/// Unit vector of R^4, i.e. a point of the round three-sphere.
class SpherePoint {
public:
    SpherePoint() : x_(0.0, 0.0, 0.0, 1.0) {}

    /// Accepts vectors whose norm is within `drift` of one and renormalizes
    /// them; anything further from the sphere throws InputError.
    explicit SpherePoint(const Vec4& x, double drift = 1e-8);

    /// Radial projection of any non-zero vector onto the sphere.
    static SpherePoint normalized(const Vec4& x);

    const Vec4& vec() const { return x_; }
    double operator[](int i) const { return x_[i]; }
    SpherePoint antipode() const { return SpherePoint(-x_); }

private:
    Vec4 x_;
};

/// Great circle Pi ∩ S^3 stored through an orthonormal basis (u, v) of Pi.
struct GreatCircle {
    Vec4 u;
    Vec4 v;

    /// Plane spanned by two distinct, non-antipodal points.
    static GreatCircle through(const SpherePoint& a, const SpherePoint& b);
    /// Plane spanned by two orthonormal vectors (validated to 1e-12 after repair).
    static GreatCircle from_basis(const Vec4& u, const Vec4& v);

    Vec4 project_to_plane(const Vec4& x) const { return u.dot(x) * u + v.dot(x) * v; }
    double distance_to_plane(const Vec4& x) const { return (x - project_to_plane(x)).norm(); }
    /// Unit tangent of the circle at a point of the circle (orientation u -> v).
    Vec4 tangent_at(const Vec4& x) const;
    /// Matrix of the reflection 2 proj - I.
    Mat4 reflection_matrix() const;
};

struct GeodesicArc {
    SpherePoint a;
    SpherePoint b;
    double length = 0.0;
    GreatCircle circle;
};

struct LawsonParams {
    int m = 1;
    int k = 1;

    LawsonParams() = default;
    LawsonParams(int m_, int k_);

    double beta() const;   // pi / (m+1), spacing of the P vertices on C1
    double theta() const;  // pi / (k+1), spacing of the Q vertices on C2
    bool both_even() const { return m % 2 == 0 && k % 2 == 0; }
    int group_order() const { return 2 * (m + 1) * (k + 1); }
    bool operator==(const LawsonParams&) const = default;
};

struct LawsonVertices {
    std::vector<SpherePoint> p;  // P_1 .. P_{2m+2} stored at index i-1
    std::vector<SpherePoint> q;  // Q_1 .. Q_{2k+2} stored at index j-1

    /// 1-based access with indices taken modulo the family size.
    const SpherePoint& P(int i) const;
    const SpherePoint& Q(int j) const;
};

SpherePoint geodesic_point(const SpherePoint& p, const Vec4& tangent, double t,
                           const Tolerances& tol = {});

SpherePoint reflect(const GreatCircle& gamma, const SpherePoint& x);

/// arccos of the clamped inner product, in [0, pi].
double sphere_distance(const SpherePoint& x, const SpherePoint& y);
double sphere_distance(const Vec4& x, const Vec4& y);

LawsonVertices lawson_vertices(const LawsonParams& params);

/// Arcs P1->Q1, Q1->P2, P2->Q2, Q2->P1 (the edges gamma_1 .. gamma_4).
std::array<GeodesicArc, 4> fundamental_quadrilateral(const LawsonParams& params);

/// Spherical linear interpolation between two non-antipodal points.
Vec4 slerp(const Vec4& a, const Vec4& b, double s);

} // namespace lawson
