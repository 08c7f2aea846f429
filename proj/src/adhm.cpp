#include "dhitchin/adhm.hpp"

#include <Eigen/SVD>
#include <random>

namespace dhitchin {

void ADHMData::validate() const {
    const int n = N();
    if (alpha1.rows() != n || alpha1.cols() != n || alpha2.rows() != n || alpha2.cols() != n)
        throw std::invalid_argument("ADHMData: alpha matrices must be N x N");
    if (a.rows() != 2 || a.cols() != n || b.rows() != n || b.cols() != 2)
        throw std::invalid_argument("ADHMData: a must be 2 x N and b must be N x 2");
}

BasisMatrices basis_matrices(int n) {
    if (n < 1) throw std::invalid_argument("basis_matrices: n must be >= 1");
    BasisMatrices out;
    out.E.reserve(n);
    out.E_minus.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
        CMatrix e = CMatrix::Zero(n, n);
        e(j, j) = 1.0;
        out.E.push_back(std::move(e));
    }
    for (int j = 0; j + 1 < n; ++j) {
        CMatrix e = CMatrix::Zero(n, n);
        e(j + 1, j) = 1.0;
        out.E_minus.push_back(std::move(e));
    }
    return out;
}

ADHMData assemble(const InstantonData& data) {
    data.validate();
    const int n1 = data.n1, n2 = data.n2, N = n1 * n2;
    auto flat = [n1](int j, int k) { return j * n1 + k; };  // 0-based site -> 0-based index
    ADHMData out;
    out.alpha1 = CMatrix::Zero(N, N);
    out.alpha2 = CMatrix::Zero(N, N);
    // E_j (x) E_k^- places F_{j,k} at row (j, k+1), column (j, k);
    // E_j^- (x) E_k places G_{j,k} at row (j+1, k), column (j, k).
    for (int j = 0; j < n2; ++j)
        for (int k = 0; k + 1 < n1; ++k) out.alpha1(flat(j, k + 1), flat(j, k)) = data.F(j, k);
    for (int j = 0; j + 1 < n2; ++j)
        for (int k = 0; k < n1; ++k) out.alpha2(flat(j + 1, k), flat(j, k)) = data.G(j, k);
    out.a = CMatrix::Zero(2, N);
    out.a(1, N - 1) = data.a0;
    out.b = CMatrix::Zero(N, 2);
    out.b(0, 0) = data.b0;
    return out;
}

CMatrix donaldson_residual1(const ADHMData& adhm) {
    adhm.validate();
    return adhm.alpha1 * adhm.alpha2 - adhm.alpha2 * adhm.alpha1 + adhm.b * adhm.a;
}

CMatrix donaldson_residual2(const ADHMData& adhm) {
    adhm.validate();
    const CMatrix& a1 = adhm.alpha1;
    const CMatrix& a2 = adhm.alpha2;
    return a1 * a1.adjoint() - a1.adjoint() * a1 + a2 * a2.adjoint() - a2.adjoint() * a2 +
           adhm.b * adhm.b.adjoint() - adhm.a.adjoint() * adhm.a;
}

bool check_equivariant_pattern(const ADHMData& adhm, int n1, int n2) {
    adhm.validate();
    const int N = adhm.N();
    if (N != n1 * n2) return false;
    auto flat = [n1](int j, int k) { return j * n1 + k; };
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed1(N, N), allowed2(N, N);
    allowed1.setConstant(false);
    allowed2.setConstant(false);
    for (int j = 0; j < n2; ++j)
        for (int k = 0; k + 1 < n1; ++k) allowed1(flat(j, k + 1), flat(j, k)) = true;
    for (int j = 0; j + 1 < n2; ++j)
        for (int k = 0; k < n1; ++k) allowed2(flat(j + 1, k), flat(j, k)) = true;
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            if (adhm.alpha1(r, c) != Complex(0.0) && !allowed1(r, c)) return false;
            if (adhm.alpha2(r, c) != Complex(0.0) && !allowed2(r, c)) return false;
        }
    for (int c = 0; c < N; ++c)
        if (adhm.a(0, c) != Complex(0.0)) return false;
    for (int c = 0; c + 1 < N; ++c)
        if (adhm.a(1, c) != Complex(0.0)) return false;
    for (int r = 1; r < N; ++r)
        if (adhm.b(r, 0) != Complex(0.0)) return false;
    for (int r = 0; r < N; ++r)
        if (adhm.b(r, 1) != Complex(0.0)) return false;
    return true;
}

namespace {

bool full_rank(const CMatrix& m, int want, double tol_ratio) {
    Eigen::BDCSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() < want) return false;
    return sv(want - 1) > tol_ratio * sv(0);
}

}  // namespace

GenericityResult genericity_check(const ADHMData& adhm, int samples, std::uint64_t seed) {
    adhm.validate();
    if (samples < 1) throw std::invalid_argument("genericity_check: samples must be >= 1");
    const int N = adhm.N();
    const CMatrix eye = CMatrix::Identity(N, N);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);

    GenericityResult res;
    auto test_point = [&](Complex z1, Complex z2) {
        CMatrix inj(2 * N + 2, N);
        inj << adhm.alpha1 - z1 * eye, adhm.alpha2 - z2 * eye, adhm.a;
        if (!full_rank(inj, N, 1e-10)) {
            res.ok = false;
            res.failing_z1 = z1;
            res.failing_z2 = z2;
            res.injective_failed = true;
            return false;
        }
        CMatrix sur(N, 2 * N + 2);
        sur << adhm.alpha1 - z1 * eye, adhm.alpha2 - z2 * eye, adhm.b;
        if (!full_rank(sur, N, 1e-10)) {
            res.ok = false;
            res.failing_z1 = z1;
            res.failing_z2 = z2;
            res.injective_failed = false;
            return false;
        }
        return true;
    };

    // The origin is the most degenerate point for nilpotent alphas; always test it.
    if (!test_point(Complex(0.0), Complex(0.0))) return res;
    for (int s = 0; s < samples; ++s) {
        Complex z1(nd(rng), nd(rng)), z2(nd(rng), nd(rng));
        if (!test_point(z1, z2)) return res;
    }
    return res;
}

}  // namespace dhitchin
