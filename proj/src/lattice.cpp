#include "dhitchin/lattice.hpp"

#include <cmath>

namespace dhitchin {

namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// Accessors treating out-of-range entries as zero (ZeroPadded) or wrapping
// (Periodic).  Indices are 0-based.
struct FieldView {
    const MatrixLatticeField& fld;
    CMatrix zero;

    explicit FieldView(const MatrixLatticeField& f)
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

void check_square(const MatrixGrid& grid, int p, const char* name) {
    for (int j = 0; j < grid.rows(); ++j)
        for (int k = 0; k < grid.cols(); ++k)
            if (grid(j, k).rows() != p || grid(j, k).cols() != p)
                throw std::invalid_argument(std::string(name) +
                                            ": matrix entries must be p x p");
}

}  // namespace

MatrixLatticeField MatrixLatticeField::zeros(const LatticeShape& shape) {
    shape.validate();
    MatrixLatticeField out;
    out.shape = shape;
    out.F = MatrixGrid(shape.f_rows(), shape.f_cols(), CMatrix::Zero(shape.p, shape.p));
    out.G = MatrixGrid(shape.g_rows(), shape.g_cols(), CMatrix::Zero(shape.p, shape.p));
    return out;
}

MatrixLatticeField MatrixLatticeField::constants(const LatticeShape& shape, const CMatrix& f,
                                                 const CMatrix& g) {
    MatrixLatticeField out = zeros(shape);
    for (auto& m : out.F) m = f;
    for (auto& m : out.G) m = g;
    out.validate();
    return out;
}

void MatrixLatticeField::validate() const {
    shape.validate();
    if (F.rows() != shape.f_rows() || F.cols() != shape.f_cols() ||
        G.rows() != shape.g_rows() || G.cols() != shape.g_cols())
        throw std::invalid_argument("MatrixLatticeField: grid extents do not match shape");
    check_square(F, shape.p, "F");
    check_square(G, shape.p, "G");
}

void InstantonData::validate() const {
    shape().validate();
    if (F.rows() != n2 || F.cols() != n1 - 1 || G.rows() != n2 - 1 || G.cols() != n1)
        throw std::invalid_argument("InstantonData: grid extents do not match (n1,n2)");
    if (!(a0 > 0.0) || !(b0 > 0.0))
        throw std::invalid_argument("InstantonData: a0 and b0 must be positive");
    if ((F.size() > 0 && F.minCoeff() <= 0.0) || (G.size() > 0 && G.minCoeff() <= 0.0))
        throw std::invalid_argument("InstantonData: all entries must be positive");
}

MatrixLatticeField InstantonData::as_matrix_field() const {
    validate();
    MatrixLatticeField out = MatrixLatticeField::zeros(shape());
    for (int j = 0; j < F.rows(); ++j)
        for (int k = 0; k < F.cols(); ++k) out.F(j, k)(0, 0) = F(j, k);
    for (int j = 0; j < G.rows(); ++j)
        for (int k = 0; k < G.cols(); ++k) out.G(j, k)(0, 0) = G(j, k);
    return out;
}

BoundaryTerms BoundaryTerms::scalars(double a0, double b0) {
    BoundaryTerms bt;
    bt.a0 = CMatrix::Constant(1, 1, Complex(a0, 0.0));
    bt.b0 = CMatrix::Constant(1, 1, Complex(b0, 0.0));
    return bt;
}

MatrixGrid holomorphic_residual(const MatrixLatticeField& field) {
    field.validate();
    const auto& sh = field.shape;
    FieldView at(field);
    const bool periodic = sh.boundary == Boundary::Periodic;
    const int rows = periodic ? sh.n2 : sh.n2 - 1;
    const int cols = periodic ? sh.n1 : sh.n1 - 1;
    MatrixGrid out(std::max(rows, 0), std::max(cols, 0));
    for (int j = 0; j < out.rows(); ++j)
        for (int k = 0; k < out.cols(); ++k)
            out(j, k) = at.F(j + 1, k) * at.G(j, k) - at.G(j, k + 1) * at.F(j, k);
    return out;
}

MatrixGrid moment_residual(const MatrixLatticeField& field,
                           const std::optional<BoundaryTerms>& boundary) {
    field.validate();
    const auto& sh = field.shape;
    if (boundary && sh.boundary == Boundary::Periodic)
        throw std::invalid_argument("moment_residual: boundary terms require ZeroPadded mode");
    FieldView at(field);
    MatrixGrid out(sh.n2, sh.n1);
    for (int j = 0; j < sh.n2; ++j)
        for (int k = 0; k < sh.n1; ++k) {
            const CMatrix& fm = at.F(j, k - 1);
            const CMatrix& f = at.F(j, k);
            const CMatrix& gm = at.G(j - 1, k);
            const CMatrix& g = at.G(j, k);
            out(j, k) = fm * fm.adjoint() - f.adjoint() * f + gm * gm.adjoint() -
                        g.adjoint() * g;
        }
    if (boundary) {
        if (boundary->a0.rows() != sh.p || boundary->a0.cols() != sh.p ||
            boundary->b0.rows() != sh.p || boundary->b0.cols() != sh.p)
            throw std::invalid_argument("moment_residual: boundary terms must be p x p");
        out(0, 0) += boundary->b0 * boundary->b0.adjoint();
        out(sh.n2 - 1, sh.n1 - 1) -= boundary->a0.adjoint() * boundary->a0;
    }
    return out;
}

MatrixLatticeField gauge_transform(const MatrixLatticeField& field, const MatrixGrid& lambda,
                                   double unitary_tol) {
    field.validate();
    const auto& sh = field.shape;
    if (lambda.rows() != sh.n2 || lambda.cols() != sh.n1)
        throw std::invalid_argument("gauge_transform: lambda must be an n2 x n1 grid");
    const CMatrix eye = CMatrix::Identity(sh.p, sh.p);
    for (int j = 0; j < sh.n2; ++j)
        for (int k = 0; k < sh.n1; ++k) {
            const CMatrix& L = lambda(j, k);
            if (L.rows() != sh.p || L.cols() != sh.p ||
                (L.adjoint() * L - eye).norm() > unitary_tol)
                throw std::invalid_argument("gauge_transform: lambda is not unitary");
        }

    // In ZeroPadded mode all factors the transformation touches lie inside the
    // n2 x n1 lambda grid; entries that would multiply padded zeros never occur.
    auto lam = [&](int j, int k) -> const CMatrix& {
        return lambda(wrap(j, sh.n2), wrap(k, sh.n1));
    };
    MatrixLatticeField out = field;
    for (int j = 0; j < out.F.rows(); ++j)
        for (int k = 0; k < out.F.cols(); ++k)
            out.F(j, k) = lam(j, k + 1) * field.F(j, k) * lam(j, k).adjoint();
    for (int j = 0; j < out.G.rows(); ++j)
        for (int k = 0; k < out.G.cols(); ++k)
            out.G(j, k) = lam(j + 1, k) * field.G(j, k) * lam(j, k).adjoint();
    return out;
}

CRResidual discrete_cr_residual(const MatrixLatticeField& field) {
    field.validate();
    const auto& sh = field.shape;
    if (sh.p != 1) throw std::domain_error("discrete_cr_residual: requires p = 1");
    auto positive_real = [](const CMatrix& m) {
        return m(0, 0).real() > 0.0 && std::abs(m(0, 0).imag()) <= 1e-14 * m(0, 0).real();
    };
    for (const auto& m : field.F)
        if (!positive_real(m)) throw std::domain_error("discrete_cr_residual: entries must be positive reals");
    for (const auto& m : field.G)
        if (!positive_real(m)) throw std::domain_error("discrete_cr_residual: entries must be positive reals");

    const bool periodic = sh.boundary == Boundary::Periodic;
    auto fv = [&](int j, int k) -> double {
        if (periodic) return field.F(wrap(j, sh.n2), wrap(k, sh.n1))(0, 0).real();
        if (j < 0 || j >= field.F.rows() || k < 0 || k >= field.F.cols()) return 0.0;
        return field.F(j, k)(0, 0).real();
    };
    auto gv = [&](int j, int k) -> double {
        if (periodic) return field.G(wrap(j, sh.n2), wrap(k, sh.n1))(0, 0).real();
        if (j < 0 || j >= field.G.rows() || k < 0 || k >= field.G.cols()) return 0.0;
        return field.G(j, k)(0, 0).real();
    };

    CRResidual out;
    const int rows1 = periodic ? sh.n2 : sh.n2 - 1;
    const int cols1 = periodic ? sh.n1 : sh.n1 - 1;
    out.log_holomorphic.resize(std::max(rows1, 0), std::max(cols1, 0));
    for (int j = 0; j < out.log_holomorphic.rows(); ++j)
        for (int k = 0; k < out.log_holomorphic.cols(); ++k)
            out.log_holomorphic(j, k) = (std::log(fv(j + 1, k)) - std::log(fv(j, k))) -
                                        (std::log(gv(j, k + 1)) - std::log(gv(j, k)));
    out.quadratic.resize(sh.n2, sh.n1);
    for (int j = 0; j < sh.n2; ++j)
        for (int k = 0; k < sh.n1; ++k) {
            double f = fv(j, k), fm = fv(j, k - 1);
            double g = gv(j, k), gm = gv(j - 1, k);
            out.quadratic(j, k) = (f * f - fm * fm) + (g * g - gm * gm);
        }
    return out;
}

double field_scale(const MatrixLatticeField& field, const std::optional<BoundaryTerms>& boundary) {
    double s = 0.0;
    for (const auto& m : field.F) s = std::max(s, m.norm());
    for (const auto& m : field.G) s = std::max(s, m.norm());
    if (boundary) {
        s = std::max(s, boundary->a0.norm());
        s = std::max(s, boundary->b0.norm());
    }
    return s;
}

namespace {

ResidualReport make_report(const MatrixGrid& r1, const MatrixGrid& r2, double scale) {
    ResidualReport rep;
    rep.field_scale = scale;
    rep.r1.resize(r1.rows(), r1.cols());
    for (int j = 0; j < r1.rows(); ++j)
        for (int k = 0; k < r1.cols(); ++k) rep.r1(j, k) = r1(j, k).norm();
    rep.r2.resize(r2.rows(), r2.cols());
    for (int j = 0; j < r2.rows(); ++j)
        for (int k = 0; k < r2.cols(); ++k) rep.r2(j, k) = r2(j, k).norm();
    rep.max_abs = 0.0;
    if (rep.r1.size() > 0) rep.max_abs = rep.r1.maxCoeff();
    if (rep.r2.size() > 0) rep.max_abs = std::max(rep.max_abs, rep.r2.maxCoeff());
    rep.scaled_max = rep.max_abs / (1.0 + scale * scale);
    return rep;
}

}  // namespace

ResidualReport residual_report(const MatrixLatticeField& field,
                               const std::optional<BoundaryTerms>& boundary) {
    return make_report(holomorphic_residual(field), moment_residual(field, boundary),
                       field_scale(field, boundary));
}

RealGrid holomorphic_residual(const InstantonData& data) {
    data.validate();
    RealGrid out(std::max(data.n2 - 1, 0), std::max(data.n1 - 1, 0));
    for (int j = 0; j + 1 < data.n2; ++j)
        for (int k = 0; k + 1 < data.n1; ++k)
            out(j, k) = data.F(j + 1, k) * data.G(j, k) - data.G(j, k + 1) * data.F(j, k);
    return out;
}

RealGrid moment_residual(const InstantonData& data, bool with_boundary) {
    data.validate();
    auto f2 = [&](int j, int k) {
        return (j >= 0 && j < data.F.rows() && k >= 0 && k < data.F.cols())
                   ? data.F(j, k) * data.F(j, k)
                   : 0.0;
    };
    auto g2 = [&](int j, int k) {
        return (j >= 0 && j < data.G.rows() && k >= 0 && k < data.G.cols())
                   ? data.G(j, k) * data.G(j, k)
                   : 0.0;
    };
    RealGrid out(data.n2, data.n1);
    for (int j = 0; j < data.n2; ++j)
        for (int k = 0; k < data.n1; ++k)
            out(j, k) = f2(j, k - 1) - f2(j, k) + g2(j - 1, k) - g2(j, k);
    if (with_boundary) {
        out(0, 0) += data.b0 * data.b0;
        out(data.n2 - 1, data.n1 - 1) -= data.a0 * data.a0;
    }
    return out;
}

ResidualReport residual_report(const InstantonData& data, bool with_boundary) {
    ResidualReport rep;
    rep.r1 = holomorphic_residual(data).cwiseAbs();
    rep.r2 = moment_residual(data, with_boundary).cwiseAbs();
    double s = 0.0;
    if (data.F.size() > 0) s = std::max(s, data.F.maxCoeff());
    if (data.G.size() > 0) s = std::max(s, data.G.maxCoeff());
    if (with_boundary) s = std::max({s, data.a0, data.b0});
    rep.field_scale = s;
    rep.max_abs = 0.0;
    if (rep.r1.size() > 0) rep.max_abs = rep.r1.maxCoeff();
    if (rep.r2.size() > 0) rep.max_abs = std::max(rep.max_abs, rep.r2.maxCoeff());
    rep.scaled_max = rep.max_abs / (1.0 + s * s);
    return rep;
}

}  // namespace dhitchin
