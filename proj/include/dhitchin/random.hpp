#ifndef DHITCHIN_RANDOM_HPP
#define DHITCHIN_RANDOM_HPP

#include <random>

#include "dhitchin/lattice.hpp"

namespace dhitchin {

using Rng = std::mt19937_64;

/// Haar-distributed U(p) matrix via QR of a complex Ginibre sample with the
/// phase convention fixed by the diagonal of R.
inline CMatrix random_unitary(int p, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMatrix z(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) z(i, j) = Complex(nd(rng), nd(rng));
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < p; ++i) {
        Complex d = r(i, i);
        q.col(i) *= (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    return q;
}

inline MatrixGrid random_unitary_grid(const LatticeShape& shape, Rng& rng) {
    MatrixGrid out(shape.n2, shape.n1);
    for (auto& m : out) m = random_unitary(shape.p, rng);
    return out;
}

/// Log-uniform positive instanton data in [lo, hi].
inline InstantonData random_instanton(int n1, int n2, Rng& rng, double lo = 0.5,
                                      double hi = 2.0) {
    std::uniform_real_distribution<double> ud(std::log(lo), std::log(hi));
    InstantonData data;
    data.n1 = n1;
    data.n2 = n2;
    data.F.resize(n2, n1 - 1);
    data.G.resize(n2 - 1, n1);
    for (int j = 0; j < data.F.rows(); ++j)
        for (int k = 0; k < data.F.cols(); ++k) data.F(j, k) = std::exp(ud(rng));
    for (int j = 0; j < data.G.rows(); ++j)
        for (int k = 0; k < data.G.cols(); ++k) data.G(j, k) = std::exp(ud(rng));
    data.a0 = std::exp(ud(rng));
    data.b0 = std::exp(ud(rng));
    return data;
}

/// Random complex matrix field on the given shape (Gaussian entries).
inline MatrixLatticeField random_matrix_field(const LatticeShape& shape, Rng& rng,
                                              double sigma = 1.0) {
    std::normal_distribution<double> nd(0.0, sigma);
    MatrixLatticeField out = MatrixLatticeField::zeros(shape);
    auto fill = [&](CMatrix& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = Complex(nd(rng), nd(rng));
    };
    for (auto& m : out.F) fill(m);
    for (auto& m : out.G) fill(m);
    return out;
}

inline VectorGrid random_vector_field(const LatticeShape& shape, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    VectorGrid out(shape.n2, shape.n1, CVector::Zero(shape.p));
    for (auto& v : out)
        for (int i = 0; i < v.size(); ++i) v(i) = Complex(nd(rng), nd(rng));
    return out;
}

}  // namespace dhitchin

#endif
