#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

enum class FieldKind { none, constant, harmonic, rectangular, table };

// External boson momentum available at each node.
struct ForceField {
    FieldKind kind = FieldKind::none;
    double phi = 0.0;        // constant force
    double omega = 0.0;      // harmonic frequency
    double lambda = 0.0;     // Delta strength
    std::int64_t width = 1;  // rectangular surrogate scale
    std::map<std::int64_t, double> table;

    static ForceField free_field() { return {}; }
    static ForceField constant(double phi);
    static ForceField harmonic(double omega);
    static ForceField rectangular(double lambda, std::int64_t width);

    double at(std::int64_t x) const;
    bool is_quadratic() const;
    // Force as alpha * x + beta; only meaningful when is_quadratic().
    double alpha() const;
    double beta() const;
};

struct ClassicalCoefficients {
    std::vector<double> A, B, C, dA, dB, dC;

    std::size_t size() const { return A.size(); }
    double wronskian(std::size_t t) const { return A[t] * dB[t] - dA[t] * B[t]; }
};

struct AbcPoint {
    double A, B, C, dA, dB, dC;
};

// Closed form at continuous lifetime t for free, constant and harmonic fields.
AbcPoint abc_closed_form(const ForceField& field, double t);

// Tabulates A, B, C at integer lifetimes 0..t_max. Throws std::invalid_argument
// for non-quadratic fields.
ClassicalCoefficients quadratic_abc(const ForceField& field, std::int64_t t_max);

// Velocity-Verlet integration of A'' = alpha A, B'' = alpha B, C'' = alpha C + beta
// with `substeps` sub-intervals per unit lifetime.
ClassicalCoefficients quadratic_abc_leapfrog(const std::function<double(double)>& alpha,
                                             const std::function<double(double)>& beta,
                                             std::int64_t t_max, int substeps = 64);

struct Kick1d {
    double f;
    int span_sign;
};

Kick1d barrier_kick_1d(double vq);

struct Kick2d {
    double f1, f2;
    std::int64_t ell1, ell2;
};

// Kick matrix [[-c, s], [s, c]] with c = (a1^2 - a2^2)/N, s = 2 a1 a2 / N.
RMat<double, 2> wall_matrix_2d(double a1, double a2);
Kick2d barrier_kick_2d(double vq1, double vq2, double a1, double a2, std::int64_t ell1, std::int64_t ell2);

struct LineDecomposition {
    double v_parallel, v_perp, ell_parallel, ell_perp, kappa;
};

LineDecomposition line_decompose(double vq1, double vq2, double ell1, double ell2, double a1, double a2);

// Ring nodes: integer points whose distance from the origin rounds to r,
// ordered clockwise starting at (0, r).
std::vector<IVec<2>> ring_nodes(std::int64_t r);
// Wall normals (a1, a2) per node from its ring neighbours.
std::vector<std::array<double, 2>> ring_wall_normals(const std::vector<IVec<2>>& nodes);

double ring_peripheral_momentum(double vq1, double vq2, double x1, double x2, double r);
// Arc increment of a lattice step (v1, v2) taken from (x1, x2).
double ring_arc_increment(std::int64_t x1, std::int64_t x2, std::int64_t v1, std::int64_t v2, double r);

struct SphereMomenta {
    double v_theta, v_phi;
};

SphereMomenta sphere_momenta(const std::array<double, 3>& vq, const std::array<double, 3>& x, double r);
double sphere_jz(double v_phi, double theta, double r);

enum class WallKind { none, box, custom };

// One-dimensional environment for the full model: a force field plus an
// optional box [-a, a] or explicit wall set.
class Environment1d {
public:
    Environment1d() = default;
    explicit Environment1d(ForceField field) : field_(std::move(field)) {}

    static Environment1d box(std::int64_t a, ForceField field = {});

    void add_wall(std::int64_t node, int outward);

    const ForceField& field() const { return field_; }
    std::optional<std::int64_t> box_half_width() const { return box_; }

    bool force(const IVec<1>& x, std::int64_t t, RVec<double, 1>& f) const;
    bool barrier(const IVec<1>& x, const RVec<double, 1>& vq, Reflection<double, 1>& r) const;

private:
    ForceField field_;
    std::optional<std::int64_t> box_;
    std::map<std::int64_t, int> walls_;
};

// Two-dimensional environment with walls carrying per-node normals.
class Environment2d {
public:
    struct Wall {
        double a1, a2;
    };

    void add_wall(const IVec<2>& node, double a1, double a2);
    static Environment2d ring(std::int64_t r);

    bool force(const IVec<2>&, std::int64_t, RVec<double, 2>&) const { return false; }
    bool barrier(const IVec<2>& x, const RVec<double, 2>& vq, Reflection<double, 2>& r) const;

    bool on_wall(const IVec<2>& x) const;

private:
    std::map<std::pair<std::int64_t, std::int64_t>, Wall> walls_;
    std::vector<IVec<2>> track_;
};

// Triangle wave of amplitude a and period p evaluated at time s.
double triangle_wave(double a, double p, double s);
// Expected position in the box [-a, a] from x0 with momentum vq after t.
double box_trajectory(double x0, double vq, double a, double t);
// Polar angle on a ring of radius r after t with peripheral momentum v.
double ring_trajectory(double phi0, double v, double r, double t);

struct SpherePoint {
    double theta, phi;
};

// Great-circle motion from (pi/2, 0) with momenta (v_theta, v_phi).
SpherePoint sphere_trajectory(double v_theta, double v_phi, double r, double t);
double central_angle(const SpherePoint& a, const SpherePoint& b);

}  // namespace qwalk
