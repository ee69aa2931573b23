#include "qwalk/forces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qwalk/numeric.hpp"

namespace qwalk {

ForceField ForceField::constant(double phi) {
    ForceField f;
    f.kind = FieldKind::constant;
    f.phi = phi;
    return f;
}

ForceField ForceField::harmonic(double omega) {
    ForceField f;
    f.kind = FieldKind::harmonic;
    f.omega = omega;
    return f;
}

ForceField ForceField::rectangular(double lambda, std::int64_t width) {
    if (width < 1) throw std::invalid_argument("rectangular field width must be >= 1");
    ForceField f;
    f.kind = FieldKind::rectangular;
    f.lambda = lambda;
    f.width = width;
    return f;
}

double ForceField::at(std::int64_t x) const {
    switch (kind) {
        case FieldKind::none:
            return 0.0;
        case FieldKind::constant:
            return phi;
        case FieldKind::harmonic:
            return -omega * omega * static_cast<double>(x);
        case FieldKind::rectangular: {
            const double h = lambda / static_cast<double>(width);
            if (x > -width && x <= 0) return h;
            if (x > -2 * width && x <= -width) return -h;
            return 0.0;
        }
        case FieldKind::table: {
            auto it = table.find(x);
            return it == table.end() ? 0.0 : it->second;
        }
    }
    return 0.0;
}

bool ForceField::is_quadratic() const {
    return kind == FieldKind::none || kind == FieldKind::constant || kind == FieldKind::harmonic;
}

double ForceField::alpha() const { return kind == FieldKind::harmonic ? -omega * omega : 0.0; }

double ForceField::beta() const { return kind == FieldKind::constant ? phi : 0.0; }

AbcPoint abc_closed_form(const ForceField& field, double t) {
    switch (field.kind) {
        case FieldKind::none:
            return {1.0, t, 0.0, 0.0, 1.0, 0.0};
        case FieldKind::constant:
            return {1.0, t, field.phi * t * t / 2.0, 0.0, 1.0, field.phi * t};
        case FieldKind::harmonic: {
            const double w = field.omega;
            if (w == 0.0) return {1.0, t, 0.0, 0.0, 1.0, 0.0};
            const double c = std::cos(w * t);
            const double s = std::sin(w * t);
            return {c, s / w, 0.0, -w * s, c, 0.0};
        }
        default:
            throw std::invalid_argument("field is not quadratic");
    }
}

ClassicalCoefficients quadratic_abc(const ForceField& field, std::int64_t t_max) {
    if (!field.is_quadratic()) throw std::invalid_argument("field is not quadratic");
    if (t_max < 0) throw std::invalid_argument("t_max must be non-negative");
    ClassicalCoefficients out;
    const auto n = static_cast<std::size_t>(t_max + 1);
    for (auto* v : {&out.A, &out.B, &out.C, &out.dA, &out.dB, &out.dC}) v->resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const AbcPoint p = abc_closed_form(field, static_cast<double>(t));
        out.A[t] = p.A;
        out.B[t] = p.B;
        out.C[t] = p.C;
        out.dA[t] = p.dA;
        out.dB[t] = p.dB;
        out.dC[t] = p.dC;
    }
    return out;
}

ClassicalCoefficients quadratic_abc_leapfrog(const std::function<double(double)>& alpha,
                                             const std::function<double(double)>& beta,
                                             std::int64_t t_max, int substeps) {
    if (t_max < 0 || substeps < 1) throw std::invalid_argument("bad leapfrog parameters");
    ClassicalCoefficients out;
    const auto n = static_cast<std::size_t>(t_max + 1);
    for (auto* v : {&out.A, &out.B, &out.C, &out.dA, &out.dB, &out.dC}) v->resize(n);
    double y[3] = {1.0, 0.0, 0.0};
    double dy[3] = {0.0, 1.0, 0.0};
    const double h = 1.0 / substeps;
    auto accel = [&](int k, double t) { return alpha(t) * y[k] + (k == 2 ? beta(t) : 0.0); };
    double t = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        out.A[step] = y[0];
        out.B[step] = y[1];
        out.C[step] = y[2];
        out.dA[step] = dy[0];
        out.dB[step] = dy[1];
        out.dC[step] = dy[2];
        if (step + 1 == n) break;
        for (int s = 0; s < substeps; ++s) {
            for (int k = 0; k < 3; ++k) dy[k] += 0.5 * h * accel(k, t);
            for (int k = 0; k < 3; ++k) y[k] += h * dy[k];
            t += h;
            for (int k = 0; k < 3; ++k) dy[k] += 0.5 * h * accel(k, t);
        }
    }
    return out;
}

Kick1d barrier_kick_1d(double vq) { return {-2.0 * vq, -1}; }

RMat<double, 2> wall_matrix_2d(double a1, double a2) {
    const double n = a1 * a1 + a2 * a2;
    if (n == 0.0) throw std::invalid_argument("wall normal must be nonzero");
    const double c = (a1 * a1 - a2 * a2) / n;
    const double s = 2.0 * a1 * a2 / n;
    return {{{-c, s}, {s, c}}};
}

Kick2d barrier_kick_2d(double vq1, double vq2, double a1, double a2, std::int64_t ell1, std::int64_t ell2) {
    const auto m = wall_matrix_2d(a1, a2);
    const double n1 = m[0][0] * vq1 + m[0][1] * vq2;
    const double n2 = m[1][0] * vq1 + m[1][1] * vq2;
    const double l1 = m[0][0] * static_cast<double>(ell1) + m[0][1] * static_cast<double>(ell2);
    const double l2 = m[1][0] * static_cast<double>(ell1) + m[1][1] * static_cast<double>(ell2);
    return {n1 - vq1, n2 - vq2, std::llround(l1), std::llround(l2)};
}

LineDecomposition line_decompose(double vq1, double vq2, double ell1, double ell2, double a1, double a2) {
    const double norm = std::hypot(a1, a2);
    if (norm == 0.0) throw std::invalid_argument("line direction must be nonzero");
    const double k = 1.0 / norm;
    return {k * (a2 * vq1 + a1 * vq2), k * (a1 * vq1 - a2 * vq2), k * (a2 * ell1 + a1 * ell2),
            k * (a1 * ell1 - a2 * ell2), k};
}

std::vector<IVec<2>> ring_nodes(std::int64_t r) {
    if (r < 1) throw std::invalid_argument("ring radius must be >= 1");
    std::vector<std::pair<double, IVec<2>>> tagged;
    for (std::int64_t x1 = -r - 1; x1 <= r + 1; ++x1) {
        for (std::int64_t x2 = -r - 1; x2 <= r + 1; ++x2) {
            const double rho = std::sqrt(static_cast<double>(x1 * x1 + x2 * x2));
            if (std::llround(rho) != r) continue;
            // clockwise angle from (0, r)
            double phi = std::atan2(static_cast<double>(x1), static_cast<double>(x2));
            if (phi < 0) phi += 2.0 * kPi;
            tagged.push_back({phi, {x1, x2}});
        }
    }
    std::sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<IVec<2>> out;
    out.reserve(tagged.size());
    for (const auto& t : tagged) out.push_back(t.second);
    return out;
}

std::vector<std::array<double, 2>> ring_wall_normals(const std::vector<IVec<2>>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<std::array<double, 2>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& next = nodes[(k + 1) % n];
        const auto& prev = nodes[(k + n - 1) % n];
        // a_d = (x_{d'}(k+1) - x_{d'}(k-1)) / 2 for a line a1 x1 - a2 x2 = a0
        out[k] = {static_cast<double>(next[1] - prev[1]) / 2.0, static_cast<double>(next[0] - prev[0]) / 2.0};
    }
    return out;
}

double ring_peripheral_momentum(double vq1, double vq2, double x1, double x2, double r) {
    return (x2 * vq1 - x1 * vq2) / r;
}

double ring_arc_increment(std::int64_t x1, std::int64_t x2, std::int64_t v1, std::int64_t v2, double r) {
    return static_cast<double>(x2 * v1 - x1 * v2) / r;
}

SphereMomenta sphere_momenta(const std::array<double, 3>& vq, const std::array<double, 3>& x, double r) {
    const double rho = std::hypot(x[0], x[1]);
    if (rho == 0.0) throw std::domain_error("sphere momenta undefined at the poles");
    return {-r * vq[2] / rho, (-x[1] * vq[0] + x[0] * vq[1]) * rho / (r * r)};
}

double sphere_jz(double v_phi, double theta, double r) {
    const double s = std::sin(theta);
    return r * v_phi * s * s;
}

Environment1d Environment1d::box(std::int64_t a, ForceField field) {
    if (a < 1) throw std::invalid_argument("box half-width must be >= 1");
    Environment1d env(std::move(field));
    env.box_ = a;
    return env;
}

void Environment1d::add_wall(std::int64_t node, int outward) { walls_[node] = outward >= 0 ? 1 : -1; }

bool Environment1d::force(const IVec<1>& x, std::int64_t, RVec<double, 1>& f) const {
    if (field_.kind == FieldKind::none) return false;
    f[0] = field_.at(x[0]);
    return f[0] != 0.0;
}

bool Environment1d::barrier(const IVec<1>& x, const RVec<double, 1>& vq, Reflection<double, 1>& r) const {
    int outward = 0;
    if (box_) {
        if (x[0] >= *box_) outward = 1;
        else if (x[0] <= -*box_) outward = -1;
    }
    if (outward == 0) {
        auto it = walls_.find(x[0]);
        if (it != walls_.end()) outward = it->second;
    }
    if (outward == 0 || vq[0] * outward <= 0.0) return false;
    r.momentum = {{{-1.0}}};
    r.span = {{{-1.0}}};
    return true;
}

void Environment2d::add_wall(const IVec<2>& node, double a1, double a2) {
    walls_[{node[0], node[1]}] = {a1, a2};
}

Environment2d Environment2d::ring(std::int64_t r) {
    Environment2d env;
    const auto nodes = ring_nodes(r);
    // Every node in the surrounding band that is off the ring reflects the
    // radial component; the normal points along the position vector.
    for (std::int64_t x1 = -r - 3; x1 <= r + 3; ++x1) {
        for (std::int64_t x2 = -r - 3; x2 <= r + 3; ++x2) {
            const double rho = std::sqrt(static_cast<double>(x1 * x1 + x2 * x2));
            if (std::llround(rho) == r || rho == 0.0) continue;
            env.add_wall({x1, x2}, static_cast<double>(x1), -static_cast<double>(x2));
        }
    }
    env.track_ = nodes;
    return env;
}

bool Environment2d::on_wall(const IVec<2>& x) const { return walls_.count({x[0], x[1]}) != 0; }

bool Environment2d::barrier(const IVec<2>& x, const RVec<double, 2>& vq, Reflection<double, 2>& r) const {
    auto it = walls_.find({x[0], x[1]});
    if (it == walls_.end()) return false;
    const double a1 = it->second.a1;
    const double a2 = it->second.a2;
    // Normal component (a1, -a2); reflect only when moving away from the track.
    const double vn = a1 * vq[0] - a2 * vq[1];
    const double side = a1 * static_cast<double>(x[0]) - a2 * static_cast<double>(x[1]);
    if (!track_.empty()) {
        const double rho = std::hypot(static_cast<double>(x[0]), static_cast<double>(x[1]));
        const double r0 = std::hypot(static_cast<double>(track_.front()[0]), static_cast<double>(track_.front()[1]));
        if ((rho - r0) * vn <= 0.0) return false;
    } else if (side * vn <= 0.0) {
        return false;
    }
    r.momentum = wall_matrix_2d(a1, a2);
    r.span = r.momentum;
    return true;
}

double triangle_wave(double a, double p, double s) {
    if (p <= 0.0) throw std::invalid_argument("triangle period must be positive");
    double u = std::fmod(s, p) / p;
    if (u < 0) u += 1.0;
    // 0 at u=0, a at u=1/4, 0 at u=1/2, -a at u=3/4
    if (u < 0.25) return 4.0 * a * u;
    if (u < 0.75) return 2.0 * a - 4.0 * a * u;
    return 4.0 * a * u - 4.0 * a;
}

double box_trajectory(double x0, double vq, double a, double t) {
    if (vq == 0.0) return x0;
    const double sgn = vq > 0 ? 1.0 : -1.0;
    return sgn * triangle_wave(a, 4.0 * a / std::fabs(vq), t + x0 / vq);
}

double ring_trajectory(double phi0, double v, double r, double t) {
    return wrap_unit((phi0 + v * t / r) / kPi) * kPi;
}

SpherePoint sphere_trajectory(double v_theta, double v_phi, double r, double t) {
    const double speed = std::hypot(v_theta, v_phi);
    if (speed == 0.0) return {kPi / 2.0, 0.0};
    const double w = speed / r;
    // start at (r, 0, 0); +theta points along -z, +phi along +y
    const double u[3] = {0.0, v_phi / speed, -v_theta / speed};
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    const double p[3] = {c, s * u[1], s * u[2]};
    return {std::acos(std::clamp(p[2], -1.0, 1.0)), std::atan2(p[1], p[0])};
}

double central_angle(const SpherePoint& a, const SpherePoint& b) {
    const double c = std::cos(a.theta) * std::cos(b.theta) +
                     std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace qwalk
