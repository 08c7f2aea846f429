#ifndef DHITCHIN_CONTINUUM_HPP
#define DHITCHIN_CONTINUUM_HPP

#include <functional>
#include <span>
#include <vector>

#include "dhitchin/lattice.hpp"

namespace dhitchin {

/// Gauge potential (Ax, Ay) and Higgs pair (P1, P2), antihermitian p x p.
struct FieldSample {
    CMatrix Ax, Ay, P1, P2;
};

/// Partial derivatives of a FieldSample in x and y.
struct FieldDerivs {
    FieldSample ddx, ddy;
};

struct Rect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

struct ContinuumField {
    int p = 1;
    std::function<FieldSample(double, double)> sample;
    std::function<FieldDerivs(double, double)> derivs;  // optional analytic derivatives
    Rect domain;

    void validate_antihermitian(double x, double y, double tol = 1e-12) const;
};

/// U(1) helper: builds the antihermitian field with A = 0 and
/// P1 = i Im w(z), P2 = i Re w(z) for a holomorphic w given together with w'.
ContinuumField holomorphic_u1_field(std::function<Complex(Complex)> w,
                                    std::function<Complex(Complex)> wprime);

/// Substitution G = n - Ax + i P1, F = n - Ay + i P2 sampled at x=j/n, y=k/n.
MatrixLatticeField discretize(const ContinuumField& cf, int n,
                              Boundary mode = Boundary::Periodic);

struct HitchinResidual {
    MatrixGrid curvature;  // F - [P1, P2]
    MatrixGrid div;        // Dx P1 + Dy P2
    MatrixGrid curl;       // Dx P2 - Dy P1
    double max_norm = 0.0;
};

/// Residuals of the flat-space equations on the given points; derivatives are
/// analytic when available, centered differences of step fd_step otherwise.
HitchinResidual hitchin_residual(const ContinuumField& cf,
                                 std::span<const std::pair<double, double>> points,
                                 double fd_step = 1e-5);

/// Convenience: uniform nx x ny interior grid over the domain.
std::vector<std::pair<double, double>> interior_grid(const Rect& domain, int nx, int ny);

struct RateTable {
    std::vector<int> ns;
    std::vector<double> values;  // max interior lattice residual / n
    double fitted_order = 0.0;
    bool exact = false;  // all values at rounding level
};

/// Interior lattice residual of discretize(cf, n) divided by n, with the
/// decay order from a log-log fit.
RateTable lattice_to_continuum_rate(const ContinuumField& cf, std::span<const int> ns);

/// Least-squares slope of log(value) against log(n); returns the decay order.
double fit_decay_order(std::span<const int> ns, std::span<const double> values);

struct NahmProfile {
    double f, g, h;
};

/// f = (pi/2) sec(pi s/2), g = -(pi/4) tan(pi s/2), h = -g on |s| < 1.
NahmProfile nahm_profile_closed_form(double s);

struct NahmCompareRow {
    int n = 0;
    double err_f = 0.0;
    double err_g1 = 0.0;
    double err_g2 = 0.0;
    double center_deviation = 0.0;  // |F at the site nearest s=0 - pi/2|
    double max_err() const { return std::max({err_f, err_g1, err_g2}); }
};

struct NahmCompareResult {
    std::vector<NahmCompareRow> rows;
    double calib_scale = 1.0;   // frozen affine calibration of the s-map
    double calib_shift = 0.0;
    double order_f = 0.0;
    double order_g1 = 0.0;
    double order_g2 = 0.0;
    double order_max = 0.0;  // decay order of the per-n max error
};

/// Compares solved (2,n) data against the closed-form profile.  The index
/// map places F at s_j = (2j-n-1)/(n+2) and the link-like G at half sites
/// t_j = (2j-n)/(n+2); each data set is scaled so the central G pair
/// averages to (n+2)/2.  A single affine calibration of the s-map is fitted
/// against the profile at the largest n and frozen for the whole sweep;
/// deviations are measured on the inner 80% of the common window.
NahmCompareResult nahm_limit_compare(std::span<const InstantonData> solved);

struct CurvedHitchinResidual {
    MatrixGrid first;   // F - (r1 r2)^-1 [P1, P2]
    MatrixGrid second;  // D1 P1 + (r1/r2) D2 P2
    MatrixGrid third;   // D1 P2 - (r2/r1) D2 P1
    double max_norm = 0.0;
};

/// Curved-space variant on an (r1, r2) grid; the field sampler is reused with
/// x = r1, y = r2.  The grid must stay away from the axes r = 0.
CurvedHitchinResidual curved_hitchin_residual(const ContinuumField& cf,
                                              std::span<const std::pair<double, double>> points,
                                              double fd_step = 1e-5);

}  // namespace dhitchin

#endif
