#ifndef DHITCHIN_LAX_HPP
#define DHITCHIN_LAX_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dhitchin/lattice.hpp"

namespace dhitchin {

/// One of the pair of lattice operators acting on p-vector fields over the
/// periodic torus.  Kind D1: G*_{j,k} X + zeta F_{j,k-1} Y^{-1};
/// kind D2: F*_{j,k} Y - zeta G_{j-1,k} X^{-1}.  X steps forward in the
/// first index, Y in the second.
struct LaxOperator {
    enum class Kind { D1, D2 };
    Kind kind = Kind::D1;
    Complex zeta{0.0, 0.0};
    LatticeShape shape;
    MatrixGrid forward_coeff;   // attached to the forward shift
    MatrixGrid backward_coeff;  // attached to the backward shift (zeta-weighted)

    VectorGrid operator()(const VectorGrid& v) const;
};

LaxOperator make_lax_operator(const MatrixLatticeField& field, LaxOperator::Kind kind,
                              Complex zeta);

inline VectorGrid apply(const LaxOperator& op, const VectorGrid& v) { return op(v); }

/// Coefficients of zeta^0, zeta^1, zeta^2 in [d1, d2]:
///   c0 attached to the XY shift, c1 diagonal, c2 attached to X^-1 Y^-1.
struct CommutatorCoefficients {
    MatrixGrid c0;
    MatrixGrid c1;
    MatrixGrid c2;
};

CommutatorCoefficients commutator_coefficients(const MatrixLatticeField& field);

struct CertificateEntry {
    Complex zeta;
    double max_ratio = 0.0;  // max over trials of |[d1,d2] v| / |v|
};

struct CertificateReport {
    std::vector<CertificateEntry> per_zeta;
    double max_ratio = 0.0;
    double coefficient_bound = 0.0;  // norm bound implied by the coefficients
    bool bound_respected = true;
};

CertificateReport integrability_certificate(const MatrixLatticeField& field,
                                            std::span<const Complex> zetas, int trials,
                                            std::uint64_t seed);

}  // namespace dhitchin

#endif
