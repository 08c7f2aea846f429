#ifndef DHITCHIN_ADHM_HPP
#define DHITCHIN_ADHM_HPP

#include <cstdint>
#include <vector>

#include "dhitchin/lattice.hpp"

namespace dhitchin {

/// Donaldson-form data: alpha1, alpha2 are N x N, a is 2 x N, b is N x 2.
struct ADHMData {
    CMatrix alpha1;
    CMatrix alpha2;
    CMatrix a;
    CMatrix b;

    int N() const { return static_cast<int>(alpha1.rows()); }
    void validate() const;
};

/// E_j = unit diagonal matrices, E_j^- = unit subdiagonal matrices (n-1 of them).
struct BasisMatrices {
    std::vector<CMatrix> E;
    std::vector<CMatrix> E_minus;
};
BasisMatrices basis_matrices(int n);

/// Kronecker-product assembly of instanton data; flattened index
/// i = (j-1) n1 + k for site (j,k).
ADHMData assemble(const InstantonData& data);

// [alpha1, alpha2] + b a
CMatrix donaldson_residual1(const ADHMData& adhm);
// [alpha1, alpha1*] + [alpha2, alpha2*] + b b* - a* a
CMatrix donaldson_residual2(const ADHMData& adhm);

/// True iff every nonzero entry sits inside the sparsity pattern the
/// Kronecker ansatz allows for extents (n1, n2).
bool check_equivariant_pattern(const ADHMData& adhm, int n1, int n2);

struct GenericityResult {
    bool ok = true;
    Complex failing_z1{};
    Complex failing_z2{};
    bool injective_failed = false;  // which of the two rank conditions failed
    operator bool() const { return ok; }
};

/// Full-rank check of the ADHM operator at the origin plus `samples` random
/// points: [alpha1 - z1; alpha2 - z2; a] must have rank N and
/// [alpha1 - z1, alpha2 - z2, b] must have rank N.  Singular values below
/// 1e-10 sigma_max count as zero.
GenericityResult genericity_check(const ADHMData& adhm, int samples, std::uint64_t seed);

}  // namespace dhitchin

#endif
