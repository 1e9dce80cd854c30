#pragma once

#include <vector>

#include "adl/data.hpp"

namespace adl {

/// Settings for min ||y - Dx||^2 + lambda * ||x||_1 (no 1/2 on the quadratic).
struct LassoConfig {
    double lambda = 0.1;
    int max_iters = 10000;
    /// Bound on the KKT residual and on the relative objective change of a sweep.
    double tol = 1e-6;

    /// Throws ConfigError.
    void validate() const;
};

struct SparseCode {
    Vector coeffs;
    double objective = 0.0;
    /// Largest violation of the subgradient optimality conditions at `coeffs`.
    double kkt_residual = 0.0;
    /// Coordinate sweeps performed (full and active-set sweeps).
    int iterations = 0;
    bool converged = false;

    [[nodiscard]] int nnz() const;
};

double lasso_objective(const Vector& y, const Matrix& dict, const Vector& x, double lambda);

/// max_j of |g_j| - lambda (clamped at 0) where x_j = 0, and |g_j + lambda sign(x_j)|
/// where x_j != 0, with g = 2 D^T (Dx - y).
double lasso_kkt_residual(const Vector& y, const Matrix& dict, const Vector& x, double lambda);

/// Cyclic coordinate descent bound to one dictionary.
///
/// Each coordinate is minimised exactly by soft-thresholding. After a full
/// sweep the solver cycles over the nonzero coordinates until they are
/// optimal, then solves the quadratic on that support and sign pattern in
/// closed form (keeping the result only if it lowers the objective), and
/// returns to a full sweep. Convergence is declared after a full
/// sweep whose objective change is below tol * (1 + |objective|) and whose
/// KKT residual is at most tol. The dictionary is used as given (atoms are not
/// renormalised) and zero atoms keep a zero coefficient.
class LassoSolver {
public:
    /// Throws DimensionError (no atoms), NumericError (non-finite entries), ConfigError.
    LassoSolver(Matrix dict, LassoConfig cfg);

    /// `objective_trace`, when given, receives the starting objective and then
    /// the objective after every sweep.
    [[nodiscard]] SparseCode solve(const Vector& y, std::vector<double>* objective_trace = nullptr) const;

    [[nodiscard]] const Matrix& dictionary() const { return dict_; }
    [[nodiscard]] const LassoConfig& config() const { return cfg_; }

private:
    // Follows the piecewise-linear solution path from x = 0 down to lambda.
    // Leaves x at the path end and returns false on a degenerate active set.
    bool follow_path(const Vector& y, Vector& x, int& steps) const;

    // Replaces x on its support by the best point on the segment towards the
    // exact minimiser for the current sign pattern. False if nothing improved.
    bool polish_support(const Vector& y, Vector& x, std::vector<Eigen::Index>& support) const;

    Matrix dict_;
    LassoConfig cfg_;
    Vector col_sq_norms_;
};

SparseCode solve_lasso(const Vector& y, const Matrix& dict, const LassoConfig& cfg);

/// Euclidean norm of y - Dx.
double reconstruction_error(const Vector& y, const Matrix& dict, const Vector& x);

}  // namespace adl
