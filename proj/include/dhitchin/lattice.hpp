#ifndef DHITCHIN_LATTICE_HPP
#define DHITCHIN_LATTICE_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dhitchin {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RealGrid = Eigen::MatrixXd;

enum class Boundary { ZeroPadded, Periodic };

/// Extent and boundary convention of a two-dimensional lattice of p x p
/// matrices.  Grid coordinates are (j,k) with j the first index (n2 values)
/// and k the second (n1 values); internal storage is 0-based.
struct LatticeShape {
    int n1 = 1;
    int n2 = 1;
    int p = 1;
    Boundary boundary = Boundary::ZeroPadded;

    // F lives on n2 x (n1-1) sites in ZeroPadded mode, the full torus otherwise.
    int f_rows() const { return n2; }
    int f_cols() const { return boundary == Boundary::Periodic ? n1 : n1 - 1; }
    int g_rows() const { return boundary == Boundary::Periodic ? n2 : n2 - 1; }
    int g_cols() const { return n1; }

    void validate() const {
        if (n1 < 1 || n2 < 1 || p < 1)
            throw std::invalid_argument("LatticeShape: extents and p must be >= 1");
    }
    bool operator==(const LatticeShape&) const = default;
};

/// Dense row-major grid of values, 0-based indexing.
template <class T>
class Grid2 {
  public:
    Grid2() = default;
    Grid2(int rows, int cols, const T& init = T())
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, init) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Grid2: negative extent");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(int j, int k) { return data_[static_cast<size_t>(j) * cols_ + k]; }
    const T& operator()(int j, int k) const { return data_[static_cast<size_t>(j) * cols_ + k]; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using MatrixGrid = Grid2<CMatrix>;
using VectorGrid = Grid2<CVector>;

/// Complex p x p matrix variables F_{j,k}, G_{j,k} on a lattice.
struct MatrixLatticeField {
    LatticeShape shape;
    MatrixGrid F;
    MatrixGrid G;

    static MatrixLatticeField zeros(const LatticeShape& shape);
    static MatrixLatticeField constants(const LatticeShape& shape, const CMatrix& f,
                                        const CMatrix& g);
    void validate() const;
};

/// Positive real instanton unknowns: F on n2 x (n1-1), G on (n2-1) x n1,
/// plus the boundary scalars a0, b0.  Always zero-padded, p = 1.
struct InstantonData {
    int n1 = 1;
    int n2 = 1;
    RealGrid F;
    RealGrid G;
    double a0 = 1.0;
    double b0 = 1.0;

    LatticeShape shape() const { return {n1, n2, 1, Boundary::ZeroPadded}; }
    void validate() const;
    MatrixLatticeField as_matrix_field() const;
};

/// Boundary contributions to the moment residual: -a0* a0 at (n2,n1) and
/// +b0 b0* at (1,1).  Only meaningful in ZeroPadded mode.
struct BoundaryTerms {
    CMatrix a0;
    CMatrix b0;
    static BoundaryTerms scalars(double a0, double b0);
};

/// Per-site residual norms plus the aggregate used for convergence checks.
struct ResidualReport {
    RealGrid r1;        // Frobenius norms of the holomorphic residual
    RealGrid r2;        // Frobenius norms of the moment residual
    double max_abs = 0.0;
    double scaled_max = 0.0;  // max_abs / (1 + field_scale^2)
    double field_scale = 0.0; // largest Frobenius norm among F, G (and a0, b0)
};

// R1(j,k) = F_{j+1,k} G_{j,k} - G_{j,k+1} F_{j,k}.
// ZeroPadded: (n2-1) x (n1-1) grid; Periodic: full torus, indices wrapped.
MatrixGrid holomorphic_residual(const MatrixLatticeField& field);

// R2(j,k) = F_{j,k-1} F*_{j,k-1} - F*_{j,k} F_{j,k}
//         + G_{j-1,k} G*_{j-1,k} - G*_{j,k} G_{j,k}   on the full n2 x n1 grid,
// with out-of-range factors replaced by zero in ZeroPadded mode and the
// optional boundary terms added at the corners.
MatrixGrid moment_residual(const MatrixLatticeField& field,
                           const std::optional<BoundaryTerms>& boundary = std::nullopt);

// G'_{j,k} = L_{j+1,k} G_{j,k} L*_{j,k},  F'_{j,k} = L_{j,k+1} F_{j,k} L*_{j,k};
// lambda is an n2 x n1 grid of U(p) matrices, checked to unitary_tol.
MatrixLatticeField gauge_transform(const MatrixLatticeField& field, const MatrixGrid& lambda,
                                   double unitary_tol = 1e-10);

struct CRResidual {
    RealGrid log_holomorphic;  // forward log differences, vanishes with R1
    RealGrid quadratic;        // backward squared differences, vanishes with R2
};

// U(1) log/difference form for positive real scalar fields.
CRResidual discrete_cr_residual(const MatrixLatticeField& field);

double field_scale(const MatrixLatticeField& field,
                   const std::optional<BoundaryTerms>& boundary = std::nullopt);

ResidualReport residual_report(const MatrixLatticeField& field,
                               const std::optional<BoundaryTerms>& boundary = std::nullopt);

// Scalar fast paths used by the solver; agree with the matrix versions.
RealGrid holomorphic_residual(const InstantonData& data);
RealGrid moment_residual(const InstantonData& data, bool with_boundary);
ResidualReport residual_report(const InstantonData& data, bool with_boundary = true);

}  // namespace dhitchin

#endif
