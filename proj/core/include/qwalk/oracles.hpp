#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qwalk/forces.hpp"
#include "qwalk/numeric.hpp"
#include "qwalk/sources.hpp"

namespace qwalk {

using Complex = std::complex<double>;

// Lattice units: hbar / m = 1 / pi. Amplitudes carry exp(i pi S).

// Free pdf as a cosine sum over ordered source pairs (one dimension).
double pdf_free(double x, double t, const SourceEnsemble& ens);
// The same pdf as |sum of amplitudes|^2.
Complex amplitude_free(double x, double t, const SourceEnsemble& ens);

// Two-dimensional forms with normalization (2t)^2.
double pdf_free_2d(double x1, double x2, double t, const SourceEnsemble& ens);
Complex amplitude_free_2d(double x1, double x2, double t, const SourceEnsemble& ens);

// Classical action of a quadratic field from a source at x0.
double quadratic_action(double x, double x0, double eps, const AbcPoint& abc);
double pdf_quadratic(double x, const SourceEnsemble& ens, const AbcPoint& abc);
Complex amplitude_quadratic(double x, const SourceEnsemble& ens, const AbcPoint& abc);

// Exact probability of reaching x at t from x0 with propensity v.
double walk_pmf(std::int64_t x, std::int64_t t, std::int64_t x0, double v);
// Average of walk_pmf over a uniform propensity; equals 1/(2t+1) inside the cone.
inline double single_source_pmf(std::int64_t t) { return 1.0 / (2.0 * static_cast<double>(t) + 1.0); }

double gaussian_free_pdf(double x, double t, double centre, double width, double v_phi);
double gaussian_faller_pdf(double x, double t, double centre, double width, double v_phi, double phi);
double gaussian_ho_pdf(double x, double t, double centre, double width, double v_phi, double omega);
Complex gaussian_free_amplitude(double x, double t, double centre, double width, double v_phi);

// Flat harmonic-oscillator pdf of a single source; zero outside the reach.
double ho_single_pdf(double x, double t, double x0, double omega);
double ho_stationary_pdf(double x, int n, double omega);
double ho_momentum_pdf(double v, int n, double omega);
inline double ho_energy(int n, double omega) { return (n + 0.5) * omega / kPi; }

// Momentum pdf: half of |sum sqrt(P) exp(i pi (x v - eps))|^2.
double pdf_momentum(double v, const SourceEnsemble& ens);
// Position pdf rebuilt from the momentum pdf through the classical map.
double position_from_momentum(double x, const SourceEnsemble& ens, const AbcPoint& abc);

// Box [-a, a].
double box_eigenfunction(int n, double a, double x);
double box_energy(int n, double a);
double box_stationary_pdf(double x, int n, double a);
double box_momentum_peak(int n, double a);
Complex box_kernel_images(double x, double t, double x0, double a, int images);
Complex box_kernel_eigen(double x, double t, double x0, double a, int levels);
// A Gaussian of width d centred at c evolved inside the box, by eigenfunction
// expansion and by image sources.
Complex box_gaussian_eigen(double x, double t, double a, double centre, double width);
Complex box_gaussian_images(double x, double t, double a, double centre, double width);

// Delta barrier at the origin.
double tra_single(double lambda);
double tra_plane(double lambda, double v_phi);
double delta_single_pdf(double x, double t, double x0, double lambda);
Complex delta_gaussian_amplitude(double x, double t, double centre, double width, double v_phi, double lambda);

// Ring of radius r in arc coordinate s = r phi.
double ring_momentum_peak(int m, double r);
double ring_plane_pdf(double r);
double ring_stationary_pdf(double s, int n, double r);

// Sphere.
double sphere_stationary_weight(double theta, int ell, int m);
double sphere_theta_peak(int ell, int m, double theta, double r);
double sphere_energy_peak(int ell, double r);

// Wigner function built from the walk kernel and the momentum pdf.
double wigner(std::int64_t x, double v, std::int64_t t, const SourceEnsemble& ens);

// Entangled double slit.
double entangled_joint_pdf(double x1, double x2, double t, double delta, double eps1, double eps2);
Complex entangled_amplitude(double x1, double x2, double t, double half_separation, double eps1, double eps2);
double correlation(double alpha, double beta);
double chsh_smax(double theta);
double single_slit_detector_pdf(bool plus, double t, double alpha);

// Relative residual of the stationarity condition for an ensemble at time t
// over nodes where the source weight is defined.
double stationary_residual(const SourceEnsemble& ens, const AbcPoint& abc, const std::vector<double>& xs);
// Harmonic ground state: the double integral as the squared modulus of a
// discrete sum over nodes |y| <= reach, relative to its closed form.
double ho_ground_residual(double omega, double t, double x, std::int64_t reach);

// Numerical integral of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi);

}  // namespace qwalk
