#include "dhitchin/instanton.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>

namespace dhitchin {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Variable layout in log coordinates: F block row-major, G block row-major,
// then log a0, log b0.
struct Layout {
    int n1, n2;
    int nF, nG, m;

    Layout(int n1_, int n2_)
        : n1(n1_), n2(n2_), nF(n2_ * (n1_ - 1)), nG((n2_ - 1) * n1_), m(nF + nG + 2) {}

    int f(int j, int k) const { return j * (n1 - 1) + k; }
    int g(int j, int k) const { return nF + j * n1 + k; }
    int a() const { return nF + nG; }
    int b() const { return nF + nG + 1; }
};

InstantonData unpack(const Eigen::VectorXd& u, const Layout& L) {
    InstantonData d;
    d.n1 = L.n1;
    d.n2 = L.n2;
    d.F.resize(L.n2, L.n1 - 1);
    d.G.resize(L.n2 - 1, L.n1);
    for (int j = 0; j < L.n2; ++j)
        for (int k = 0; k < L.n1 - 1; ++k) d.F(j, k) = std::exp(u[L.f(j, k)]);
    for (int j = 0; j < L.n2 - 1; ++j)
        for (int k = 0; k < L.n1; ++k) d.G(j, k) = std::exp(u[L.g(j, k)]);
    d.a0 = std::exp(u[L.a()]);
    d.b0 = std::exp(u[L.b()]);
    return d;
}

Eigen::VectorXd pack(const InstantonData& d) {
    Layout L(d.n1, d.n2);
    Eigen::VectorXd u(L.m);
    for (int j = 0; j < L.n2; ++j)
        for (int k = 0; k < L.n1 - 1; ++k) u[L.f(j, k)] = std::log(d.F(j, k));
    for (int j = 0; j < L.n2 - 1; ++j)
        for (int k = 0; k < L.n1; ++k) u[L.g(j, k)] = std::log(d.G(j, k));
    u[L.a()] = std::log(d.a0);
    u[L.b()] = std::log(d.b0);
    return u;
}

// Residual of the lattice system (R1 rows, then R2 rows, then one
// normalization row unless norm_row is false) and its Jacobian with respect
// to the log variables.
struct Assembled {
    Eigen::VectorXd r;
    SpMat J;
};

Assembled assemble(const Eigen::VectorXd& u, const Layout& L, bool norm_row,
                   Normalization norm, double target) {
    const InstantonData d = unpack(u, L);
    const int n1 = L.n1, n2 = L.n2;
    const int nR1 = (n2 - 1) * (n1 - 1);
    const int nEq = nR1 + n1 * n2 + (norm_row ? 1 : 0);

    Assembled out;
    out.r.setZero(nEq);
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(nEq) * 5);

    int row = 0;
    for (int j = 0; j + 1 < n2; ++j)
        for (int k = 0; k + 1 < n1; ++k) {
            const double t1 = d.F(j + 1, k) * d.G(j, k);
            const double t2 = d.G(j, k + 1) * d.F(j, k);
            out.r[row] = t1 - t2;
            trips.emplace_back(row, L.f(j + 1, k), t1);
            trips.emplace_back(row, L.g(j, k), t1);
            trips.emplace_back(row, L.g(j, k + 1), -t2);
            trips.emplace_back(row, L.f(j, k), -t2);
            ++row;
        }
    for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n1; ++k) {
            double v = 0.0;
            if (k - 1 >= 0 && k - 1 < n1 - 1) {
                const double s = d.F(j, k - 1) * d.F(j, k - 1);
                v += s;
                trips.emplace_back(row, L.f(j, k - 1), 2.0 * s);
            }
            if (k < n1 - 1) {
                const double s = d.F(j, k) * d.F(j, k);
                v -= s;
                trips.emplace_back(row, L.f(j, k), -2.0 * s);
            }
            if (j - 1 >= 0) {
                const double s = d.G(j - 1, k) * d.G(j - 1, k);
                v += s;
                trips.emplace_back(row, L.g(j - 1, k), 2.0 * s);
            }
            if (j < n2 - 1) {
                const double s = d.G(j, k) * d.G(j, k);
                v -= s;
                trips.emplace_back(row, L.g(j, k), -2.0 * s);
            }
            if (j == 0 && k == 0) {
                v += d.b0 * d.b0;
                trips.emplace_back(row, L.b(), 2.0 * d.b0 * d.b0);
            }
            if (j == n2 - 1 && k == n1 - 1) {
                v -= d.a0 * d.a0;
                trips.emplace_back(row, L.a(), -2.0 * d.a0 * d.a0);
            }
            out.r[row] = v;
            ++row;
        }
    if (norm_row) {
        if (norm == Normalization::FixB0) {
            out.r[row] = u[L.b()];
            trips.emplace_back(row, L.b(), 1.0);
        } else {
            double s = d.a0 * d.a0 + d.b0 * d.b0;
            if (d.F.size() > 0) s += d.F.array().square().sum();
            if (d.G.size() > 0) s += d.G.array().square().sum();
            out.r[row] = s - target;
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n1 - 1; ++k)
                    trips.emplace_back(row, L.f(j, k), 2.0 * d.F(j, k) * d.F(j, k));
            for (int j = 0; j < n2 - 1; ++j)
                for (int k = 0; k < n1; ++k)
                    trips.emplace_back(row, L.g(j, k), 2.0 * d.G(j, k) * d.G(j, k));
            trips.emplace_back(row, L.a(), 2.0 * d.a0 * d.a0);
            trips.emplace_back(row, L.b(), 2.0 * d.b0 * d.b0);
        }
        ++row;
    }
    out.J.resize(nEq, L.m);
    out.J.setFromTriplets(trips.begin(), trips.end());
    return out;
}

double norm_row_scale(Normalization norm, double target) {
    return norm == Normalization::FixB0 ? 1.0 : 1.0 + std::abs(target);
}

// Dense singular-value diagnostics; exact reference for small systems.
KernelGap kernel_gap_dense(const SpMat& J) {
    const int m = static_cast<int>(J.cols());
    Eigen::MatrixXd Jd(J);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Jd, Eigen::ComputeFullV);
    KernelGap out;
    out.sigma_max = svd.singularValues()(0);
    out.sigma_second = svd.singularValues()(svd.singularValues().size() - 1);
    Eigen::VectorXd v = svd.matrixV().col(m - 1);
    out.sigma_min = (Jd * v).norm();
    out.kernel_alignment = std::abs(v.sum()) / std::sqrt(static_cast<double>(m));
    return out;
}

// Sparse path for large systems: power iteration for sigma_max, then inverse
// iteration on J^T J + tau I for the kernel vector and, deflated, for the
// smallest nontrivial singular value.
KernelGap kernel_gap_sparse(const SpMat& J) {
    const int m = static_cast<int>(J.cols());
    SpMat A = (SpMat(J.transpose()) * J).pruned();

    Eigen::VectorXd x = Eigen::VectorXd::Ones(m) / std::sqrt(double(m));
    for (int i = 0; i < m; ++i) x[i] += 1e-2 * std::cos(0.7 * i);  // break symmetry
    x.normalize();
    double lam = 0.0;
    for (int it = 0; it < 300; ++it) {
        Eigen::VectorXd y = A * x;
        double ny = y.norm();
        if (ny == 0.0) break;
        y /= ny;
        double lam_new = y.dot(A * y);
        x = y;
        if (it > 10 && std::abs(lam_new - lam) <= 1e-14 * lam_new) { lam = lam_new; break; }
        lam = lam_new;
    }
    KernelGap out;
    out.sigma_max = std::sqrt(std::max(lam, 0.0));

    const double tau = std::pow(1e-7 * out.sigma_max, 2) + 1e-300;
    SpMat K = A;
    for (int i = 0; i < m; ++i) K.coeffRef(i, i) += tau;
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        return kernel_gap_dense(J);

    Eigen::VectorXd v1 = Eigen::VectorXd::Ones(m) / std::sqrt(double(m));
    for (int it = 0; it < 10; ++it) {
        v1 = ldlt.solve(v1);
        v1.normalize();
    }
    out.sigma_min = (J * v1).norm();
    out.kernel_alignment = std::abs(v1.sum()) / std::sqrt(double(m));

    Eigen::VectorXd v2(m);
    for (int i = 0; i < m; ++i) v2[i] = std::sin(1.3 * i + 0.2);
    v2 -= v1 * v1.dot(v2);
    v2.normalize();
    for (int it = 0; it < 120; ++it) {
        v2 = ldlt.solve(v2);
        v2 -= v1 * v1.dot(v2);
        v2 -= v1 * v1.dot(v2);  // repeated projection for stability
        v2.normalize();
    }
    out.sigma_second = (J * v2).norm();
    return out;
}

KernelGap kernel_gap_of(const SpMat& J) {
    return J.cols() <= 1200 ? kernel_gap_dense(J) : kernel_gap_sparse(J);
}

SolveOutcome run_lm(const Eigen::VectorXd& u0, const Layout& L, const SolverConfig& cfg) {
    Eigen::VectorXd u = u0;
    Assembled cur = assemble(u, L, true, cfg.normalization, cfg.sum_squares_target);
    double cost = 0.5 * cur.r.squaredNorm();

    SpMat A = (SpMat(cur.J.transpose()) * cur.J).pruned();
    double mu = cfg.damping_init * A.diagonal().maxCoeff();
    double nu = cfg.damping_growth;

    SolveOutcome out;
    out.iterations = 0;

    auto finish = [&](bool converged) {
        out.data = unpack(u, L);
        out.report = residual_report(out.data, true);
        out.converged = converged;
        Assembled unnorm = assemble(u, L, false, cfg.normalization, cfg.sum_squares_target);
        out.kernel = kernel_gap_of(unnorm.J);
        out.jacobian_rank_gap =
            out.kernel.sigma_max > 0.0 ? out.kernel.sigma_min / out.kernel.sigma_max : 0.0;
        return out;
    };

    const double norm_tol = 1e-10 * norm_row_scale(cfg.normalization, cfg.sum_squares_target);
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool pattern_ready = false;

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        out.iterations = it;
        {
            InstantonData d = unpack(u, L);
            ResidualReport rep = residual_report(d, true);
            if (rep.scaled_max <= cfg.tolerance && std::abs(cur.r[cur.r.size() - 1]) <= norm_tol)
                return finish(true);
        }
        Eigen::VectorXd g = cur.J.transpose() * cur.r;
        SpMat M = A;
        for (int i = 0; i < L.m; ++i) M.coeffRef(i, i) += mu * A.coeff(i, i);
        if (!pattern_ready) {
            ldlt.analyzePattern(M);
            pattern_ready = true;
        }
        ldlt.factorize(M);
        if (ldlt.info() != Eigen::Success) {
            mu *= 4.0;
            continue;
        }
        Eigen::VectorXd delta = ldlt.solve(-g);
        if (delta.norm() <= 1e-15 * (1.0 + u.norm())) {
            InstantonData d = unpack(u, L);
            ResidualReport rep = residual_report(d, true);
            return finish(rep.scaled_max <= cfg.tolerance);
        }
        Eigen::VectorXd u_new = u + delta;
        Assembled next = assemble(u_new, L, true, cfg.normalization, cfg.sum_squares_target);
        double cost_new = 0.5 * next.r.squaredNorm();
        if (cost_new < cost) {
            double pred = 0.5 * delta.dot(mu * delta.cwiseProduct(A.diagonal()) - g);
            double rho = pred > 0.0 ? (cost - cost_new) / pred : 1.0;
            u = u_new;
            cur = std::move(next);
            cost = cost_new;
            A = (SpMat(cur.J.transpose()) * cur.J).pruned();
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = cfg.damping_growth;
        } else {
            mu *= nu;
            nu *= 2.0;
            if (mu > 1e40) return finish(false);
        }
    }
    InstantonData d = unpack(u, L);
    ResidualReport rep = residual_report(d, true);
    return finish(rep.scaled_max <= cfg.tolerance);
}

}  // namespace

long equation_count(int n1, int n2) {
    return 2L * n1 * n2 - n1 - n2 + 1;
}

long variable_count(int n1, int n2) {
    return 2L * n1 * n2 - n1 - n2 + 2;
}

std::optional<InstantonData> closed_form(int n1, int n2, double lambda) {
    if (n1 < 1 || n2 < 1 || !(lambda > 0.0)) return std::nullopt;
    InstantonData d;
    d.n1 = n1;
    d.n2 = n2;
    d.F.resize(n2, n1 - 1);
    d.G.resize(n2 - 1, n1);
    if (n1 == 1 || n2 == 1) {
        // Eq-telescoping forces all entries equal; a0 = b0 = that value.
        d.F.setConstant(lambda);
        d.G.setConstant(lambda);
        d.a0 = d.b0 = lambda;
        return d;
    }
    if (n1 == 2 && n2 == 2) {
        d.F.setConstant(lambda);
        d.G.setConstant(lambda);
        d.a0 = d.b0 = lambda * std::sqrt(2.0);
        return d;
    }
    if (n1 == 2 && n2 == 4) {
        const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
        d.F << r2, 1.0, 1.0, r2;
        d.G << 2.0, r2, r3, r3, r2, 2.0;
        d.F *= lambda;
        d.G *= lambda;
        d.a0 = d.b0 = lambda * std::sqrt(6.0);
        return d;
    }
    if (n1 == 4 && n2 == 2) {
        auto swapped = closed_form(2, 4, lambda);
        return verify_swap(*swapped);
    }
    return std::nullopt;
}

SolveOutcome solve(int n1, int n2, const SolverConfig& config) {
    config.validate();
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("solve: extents must be >= 1");
    Layout L(n1, n2);

    if (config.initial_guess == SolverConfig::Guess::Continuation) {
        // Halving ladder down to a directly solvable base case.
        std::vector<std::pair<int, int>> ladder{{n1, n2}};
        int a = n1, b = n2;
        while (a > 4 || b > 4) {
            a = (a + 1) / 2;
            b = (b + 1) / 2;
            ladder.insert(ladder.begin(), {a, b});
        }
        SolverConfig base = config;
        base.initial_guess = SolverConfig::Guess::Ones;
        base.custom_guess.reset();
        auto outcomes = continuation_solve(ladder, base);
        return outcomes.back();
    }

    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(L.m);
    if (config.initial_guess == SolverConfig::Guess::Custom) {
        if (!config.custom_guess)
            throw std::invalid_argument("solve: Custom guess requires custom_guess data");
        config.custom_guess->validate();
        if (config.custom_guess->n1 != n1 || config.custom_guess->n2 != n2)
            throw std::invalid_argument("solve: custom guess has wrong extents");
        u0 = pack(*config.custom_guess);
    }
    return run_lm(u0, L, config);
}

std::vector<SolveOutcome> continuation_solve(const std::vector<std::pair<int, int>>& targets,
                                             const SolverConfig& config) {
    config.validate();
    std::vector<SolveOutcome> out;
    out.reserve(targets.size());
    for (size_t i = 0; i < targets.size(); ++i) {
        auto [n1, n2] = targets[i];
        SolverConfig step = config;
        step.custom_guess.reset();
        if (i == 0) {
            step.initial_guess = SolverConfig::Guess::Ones;
        } else {
            step.initial_guess = SolverConfig::Guess::Custom;
            step.custom_guess = interpolate_log(out.back().data, n1, n2);
        }
        out.push_back(solve(n1, n2, step));
        if (!out.back().converged)
            throw std::runtime_error("continuation_solve: size (" + std::to_string(n1) + "," +
                                     std::to_string(n2) + ") did not converge; best scaled residual " +
                                     std::to_string(out.back().report.scaled_max));
    }
    return out;
}

InstantonData interpolate_log(const InstantonData& src, int n1, int n2) {
    src.validate();
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("interpolate_log: extents must be >= 1");

    // Map target index i (0-based, extent nt) onto the source index range.
    auto coord = [](int i, int nt, int ns) -> double {
        if (ns <= 1) return 0.0;
        if (nt <= 1) return 0.5 * (ns - 1);
        return static_cast<double>(i) * (ns - 1) / (nt - 1);
    };
    auto sample = [&](const RealGrid& grid, double x, double y) -> double {
        const int r = static_cast<int>(grid.rows()), c = static_cast<int>(grid.cols());
        int j0 = std::min(static_cast<int>(std::floor(x)), r - 1);
        int k0 = std::min(static_cast<int>(std::floor(y)), c - 1);
        int j1 = std::min(j0 + 1, r - 1), k1 = std::min(k0 + 1, c - 1);
        double tx = x - j0, ty = y - k0;
        double lg = (1 - tx) * (1 - ty) * std::log(grid(j0, k0)) +
                    tx * (1 - ty) * std::log(grid(j1, k0)) +
                    (1 - tx) * ty * std::log(grid(j0, k1)) + tx * ty * std::log(grid(j1, k1));
        return std::exp(lg);
    };

    InstantonData out;
    out.n1 = n1;
    out.n2 = n2;
    out.F.resize(n2, n1 - 1);
    out.G.resize(n2 - 1, n1);
    for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n1 - 1; ++k)
            out.F(j, k) = src.F.size() > 0
                              ? sample(src.F, coord(j, n2, src.F.rows()), coord(k, n1 - 1, src.F.cols()))
                              : 1.0;
    for (int j = 0; j < n2 - 1; ++j)
        for (int k = 0; k < n1; ++k)
            out.G(j, k) = src.G.size() > 0
                              ? sample(src.G, coord(j, n2 - 1, src.G.rows()), coord(k, n1, src.G.cols()))
                              : 1.0;
    out.a0 = src.a0;
    out.b0 = src.b0;
    return out;
}

InstantonData normalize(const InstantonData& data, Normalization normalization,
                        double sum_squares_target) {
    data.validate();
    double lambda = 1.0;
    if (normalization == Normalization::FixB0) {
        lambda = 1.0 / data.b0;
    } else {
        if (!(sum_squares_target > 0.0))
            throw std::invalid_argument("normalize: sum-of-squares target must be > 0");
        double s = data.a0 * data.a0 + data.b0 * data.b0;
        if (data.F.size() > 0) s += data.F.array().square().sum();
        if (data.G.size() > 0) s += data.G.array().square().sum();
        lambda = std::sqrt(sum_squares_target / s);
    }
    InstantonData out = data;
    out.F *= lambda;
    out.G *= lambda;
    out.a0 *= lambda;
    out.b0 *= lambda;
    return out;
}

InstantonData verify_swap(const InstantonData& data) {
    data.validate();
    InstantonData out;
    out.n1 = data.n2;
    out.n2 = data.n1;
    out.F.resize(out.n2, out.n1 - 1);
    out.G.resize(out.n2 - 1, out.n1);
    // F'_{j,k} = G_{k,j}, G'_{j,k} = F_{k,j} in 1-based paper indices.
    for (int j = 0; j < out.F.rows(); ++j)
        for (int k = 0; k < out.F.cols(); ++k) out.F(j, k) = data.G(k, j);
    for (int j = 0; j < out.G.rows(); ++j)
        for (int k = 0; k < out.G.cols(); ++k) out.G(j, k) = data.F(k, j);
    out.a0 = data.b0;
    out.b0 = data.a0;
    return out;
}

KernelGap kernel_gap(const InstantonData& data) {
    data.validate();
    Layout L(data.n1, data.n2);
    Assembled sys = assemble(pack(data), L, false, Normalization::FixB0, 1.0);
    return kernel_gap_of(sys.J);
}

}  // namespace dhitchin
