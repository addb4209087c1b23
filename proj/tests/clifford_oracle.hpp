#pragma once

// Analytic oracles for the Clifford torus xi_{1,1}.

#include "lawson/assembly.hpp"
#include "lawson/plateau.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

// Point of the torus x1 x2 = x3 x4 at flat coordinates (u, v); the torus has
// area 2 pi^2 and is isometric to R^2 / (2 pi Z)^2 scaled by 1/sqrt(2).
inline lawson::Vec4 clifford_point(double u, double v) {
    const double a = std::cos(u) / std::sqrt(2.0);
    const double d = std::sin(u) / std::sqrt(2.0);
    const double b = std::cos(v) / std::sqrt(2.0);
    const double c = std::sin(v) / std::sqrt(2.0);
    const double r = 1.0 / std::sqrt(2.0);
    return lawson::Vec4((a + b) * r, (a - b) * r, (c + d) * r, (c - d) * r);
}

// Exact (1,1) patch: the same grid and tags as init_disk_mesh, vertices on the
// parallelogram with corners P1 = (-pi/2, pi/2), Q1 = (0, pi), Q2 = (0, 0).
inline lawson::TriMesh clifford_patch(int n) {
    constexpr double pi = std::numbers::pi;
    lawson::TriMesh mesh = lawson::init_disk_mesh(lawson::LawsonParams(1, 1), n);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double s = static_cast<double>(i) / n;
            const double t = static_cast<double>(j) / n;
            const double u = -pi / 2 + s * (pi / 2) + t * (pi / 2);
            const double v = pi / 2 + s * (pi / 2) - t * (pi / 2);
            mesh.vertices[j * (n + 1) + i] = clifford_point(u, v);
        }
    }
    return mesh;
}

inline lawson::AssembledSurface clifford_surface(int n) { return lawson::assemble(clifford_patch(n)); }

// Flat-torus spectrum 2 (p^2 + q^2), sorted with multiplicity.
inline std::vector<double> flat_torus_spectrum(int count) {
    std::vector<double> out;
    const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)))) + 2;
    for (int p = -r; p <= r; ++p) {
        for (int q = -r; q <= r; ++q) {
            out.push_back(2.0 * (p * p + q * q));
        }
    }
    std::sort(out.begin(), out.end());
    out.resize(count);
    return out;
}

} // namespace oracle
