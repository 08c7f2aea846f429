#include "dhitchin/lax.hpp"

#include "dhitchin/random.hpp"

namespace dhitchin {

namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

struct PaddedView {
    const MatrixLatticeField& fld;
    CMatrix zero;

    explicit PaddedView(const MatrixLatticeField& f)
        : fld(f), zero(CMatrix::Zero(f.shape.p, f.shape.p)) {}

    const CMatrix& F(int j, int k) const {
        if (fld.shape.boundary == Boundary::Periodic)
            return fld.F(wrap(j, fld.shape.n2), wrap(k, fld.shape.n1));
        if (j < 0 || j >= fld.F.rows() || k < 0 || k >= fld.F.cols()) return zero;
        return fld.F(j, k);
    }
    const CMatrix& G(int j, int k) const {
        if (fld.shape.boundary == Boundary::Periodic)
            return fld.G(wrap(j, fld.shape.n2), wrap(k, fld.shape.n1));
        if (j < 0 || j >= fld.G.rows() || k < 0 || k >= fld.G.cols()) return zero;
        return fld.G(j, k);
    }
};

double grid_norm(const VectorGrid& v) {
    double s = 0.0;
    for (const auto& x : v) s += x.squaredNorm();
    return std::sqrt(s);
}

}  // namespace

LaxOperator make_lax_operator(const MatrixLatticeField& field, LaxOperator::Kind kind,
                              Complex zeta) {
    field.validate();
    if (field.shape.boundary != Boundary::Periodic)
        throw std::invalid_argument("make_lax_operator: operator application needs a periodic lattice");
    const auto& sh = field.shape;
    LaxOperator op;
    op.kind = kind;
    op.zeta = zeta;
    op.shape = sh;
    op.forward_coeff = MatrixGrid(sh.n2, sh.n1);
    op.backward_coeff = MatrixGrid(sh.n2, sh.n1);
    for (int j = 0; j < sh.n2; ++j)
        for (int k = 0; k < sh.n1; ++k) {
            if (kind == LaxOperator::Kind::D1) {
                op.forward_coeff(j, k) = field.G(j, k).adjoint();
                op.backward_coeff(j, k) = field.F(j, wrap(k - 1, sh.n1));
            } else {
                op.forward_coeff(j, k) = field.F(j, k).adjoint();
                op.backward_coeff(j, k) = -field.G(wrap(j - 1, sh.n2), k);
            }
        }
    return op;
}

VectorGrid LaxOperator::operator()(const VectorGrid& v) const {
    const auto& sh = shape;
    if (v.rows() != sh.n2 || v.cols() != sh.n1)
        throw std::invalid_argument("apply: vector field extents do not match the torus");
    VectorGrid out(sh.n2, sh.n1, CVector::Zero(sh.p));
    for (int j = 0; j < sh.n2; ++j)
        for (int k = 0; k < sh.n1; ++k) {
            if (kind == Kind::D1)
                out(j, k) = forward_coeff(j, k) * v(wrap(j + 1, sh.n2), k) +
                            zeta * (backward_coeff(j, k) * v(j, wrap(k - 1, sh.n1)));
            else
                out(j, k) = forward_coeff(j, k) * v(j, wrap(k + 1, sh.n1)) +
                            zeta * (backward_coeff(j, k) * v(wrap(j - 1, sh.n2), k));
        }
    return out;
}

CommutatorCoefficients commutator_coefficients(const MatrixLatticeField& field) {
    field.validate();
    const auto& sh = field.shape;
    PaddedView at(field);
    CommutatorCoefficients out;
    out.c0 = MatrixGrid(sh.n2, sh.n1);
    out.c1 = MatrixGrid(sh.n2, sh.n1);
    out.c2 = MatrixGrid(sh.n2, sh.n1);
    for (int j = 0; j < sh.n2; ++j)
        for (int k = 0; k < sh.n1; ++k) {
            out.c0(j, k) = at.G(j, k).adjoint() * at.F(j + 1, k).adjoint() -
                           at.F(j, k).adjoint() * at.G(j, k + 1).adjoint();
            out.c1(j, k) = at.F(j, k - 1) * at.F(j, k - 1).adjoint() -
                           at.F(j, k).adjoint() * at.F(j, k) +
                           at.G(j - 1, k) * at.G(j - 1, k).adjoint() -
                           at.G(j, k).adjoint() * at.G(j, k);
            out.c2(j, k) = at.G(j - 1, k) * at.F(j - 1, k - 1) -
                           at.F(j, k - 1) * at.G(j - 1, k - 1);
        }
    return out;
}

CertificateReport integrability_certificate(const MatrixLatticeField& field,
                                            std::span<const Complex> zetas, int trials,
                                            std::uint64_t seed) {
    field.validate();
    if (field.shape.boundary != Boundary::Periodic)
        throw std::invalid_argument("integrability_certificate: requires a periodic lattice");
    if (zetas.empty()) throw std::invalid_argument("integrability_certificate: empty zeta list");
    if (trials < 1) throw std::invalid_argument("integrability_certificate: trials must be >= 1");

    auto coeffs = commutator_coefficients(field);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& m : coeffs.c0) m0 = std::max(m0, m.norm());
    for (const auto& m : coeffs.c1) m1 = std::max(m1, m.norm());
    for (const auto& m : coeffs.c2) m2 = std::max(m2, m.norm());

    Rng rng(seed);
    CertificateReport rep;
    rep.max_ratio = 0.0;
    rep.bound_respected = true;
    const double scale = field_scale(field);
    const double slack = 1e-12 * (1.0 + scale * scale);
    double worst_bound = 0.0;
    for (Complex zeta : zetas) {
        LaxOperator d1 = make_lax_operator(field, LaxOperator::Kind::D1, zeta);
        LaxOperator d2 = make_lax_operator(field, LaxOperator::Kind::D2, zeta);
        CertificateEntry entry;
        entry.zeta = zeta;
        for (int t = 0; t < trials; ++t) {
            VectorGrid v = random_vector_field(field.shape, rng);
            VectorGrid w1 = d1(d2(v));
            VectorGrid w2 = d2(d1(v));
            double num = 0.0;
            for (int j = 0; j < w1.rows(); ++j)
                for (int k = 0; k < w1.cols(); ++k) num += (w1(j, k) - w2(j, k)).squaredNorm();
            double ratio = std::sqrt(num) / grid_norm(v);
            entry.max_ratio = std::max(entry.max_ratio, ratio);
        }
        const double az = std::abs(zeta);
        const double bound = m0 + az * m1 + az * az * m2;
        worst_bound = std::max(worst_bound, bound);
        if (entry.max_ratio > bound * (1.0 + 1e-10) + slack) rep.bound_respected = false;
        rep.max_ratio = std::max(rep.max_ratio, entry.max_ratio);
        rep.per_zeta.push_back(entry);
    }
    rep.coefficient_bound = worst_bound;
    return rep;
}

}  // namespace dhitchin
