#ifndef DHITCHIN_INSTANTON_HPP
#define DHITCHIN_INSTANTON_HPP

#include <optional>
#include <utility>
#include <vector>

#include "dhitchin/lattice.hpp"

namespace dhitchin {

enum class Normalization { FixB0, FixSumSquares };

struct SolverConfig {
    double tolerance = 1e-12;   // target scaled residual
    int max_iterations = 400;
    Normalization normalization = Normalization::FixB0;
    double sum_squares_target = 1.0;  // used with FixSumSquares

    enum class Guess { Ones, Continuation, Custom };
    Guess initial_guess = Guess::Ones;
    std::optional<InstantonData> custom_guess;

    // Levenberg-Marquardt damping schedule
    double damping_init = 1e-3;
    double damping_growth = 2.0;

    void validate() const {
        if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
        if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
        if (normalization == Normalization::FixSumSquares && !(sum_squares_target > 0.0))
            throw std::invalid_argument("SolverConfig: sum-of-squares target must be > 0");
    }
};

/// Singular-value structure of the unnormalized Jacobian at a solution.
/// The system has one more variable than equation; sigma_min is the
/// (structural) kernel value, sigma_second the smallest nontrivial one.
struct KernelGap {
    double sigma_max = 0.0;
    double sigma_second = 0.0;
    double sigma_min = 0.0;
    double kernel_alignment = 0.0;  // |<kernel, ones>| in log coordinates
};

struct SolveOutcome {
    InstantonData data;
    ResidualReport report;
    int iterations = 0;
    bool converged = false;
    double jacobian_rank_gap = 0.0;  // sigma_min / sigma_max
    KernelGap kernel;
};

// System size: 2 n1 n2 - n1 - n2 + 1 equations in 2 n1 n2 - n1 - n2 + 2 unknowns.
long equation_count(int n1, int n2);
long variable_count(int n1, int n2);

// Exact solutions for (2,2), (2,4), (4,2) and the degenerate n1=1 / n2=1
// families, scaled by lambda; nullopt for other sizes.
std::optional<InstantonData> closed_form(int n1, int n2, double lambda = 1.0);

SolveOutcome solve(int n1, int n2, const SolverConfig& config = {});

// Solves the targets in order, seeding each from the bilinear log-space
// interpolation of the previous solution.
std::vector<SolveOutcome> continuation_solve(const std::vector<std::pair<int, int>>& targets,
                                             const SolverConfig& config = {});

// Bilinear interpolation of log-variables onto the (n1,n2) index grids.
InstantonData interpolate_log(const InstantonData& src, int n1, int n2);

InstantonData normalize(const InstantonData& data, Normalization normalization,
                        double sum_squares_target = 1.0);

// The (n1,n2) -> (n2,n1) swap: F and G exchanged with transposed indices,
// a0 and b0 exchanged.
InstantonData verify_swap(const InstantonData& data);

// Singular-value diagnostics of the unnormalized residual Jacobian in log
// coordinates at the given data.
KernelGap kernel_gap(const InstantonData& data);

}  // namespace dhitchin

#endif
