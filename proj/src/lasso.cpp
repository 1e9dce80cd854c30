#include "adl/lasso.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "adl/errors.hpp"

namespace adl {

namespace {

// Active-set sweeps between two support polishes.
constexpr int kActiveSweeps = 10;

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double violation(double grad, double coeff, double lambda) {
    if (coeff == 0.0) return std::max(0.0, std::abs(grad) - lambda);
    return std::abs(grad + (coeff > 0 ? lambda : -lambda));
}

void check_dims(const Vector& y, const Matrix& dict, const Vector* x) {
    if (dict.cols() < 1) throw DimensionError("lasso: dictionary has no atoms");
    if (y.size() != dict.rows()) throw DimensionError("lasso: signal length differs from atom length");
    if (x && x->size() != dict.cols()) throw DimensionError("lasso: coefficient count differs from atom count");
}

}  // namespace

void LassoConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lasso: lambda must be finite and >= 0");
    if (!(tol > 0.0)) throw ConfigError("lasso: tol must be > 0");
    if (max_iters < 1) throw ConfigError("lasso: max_iters must be >= 1");
}

int SparseCode::nnz() const { return static_cast<int>((coeffs.array() != 0.0).count()); }

double lasso_objective(const Vector& y, const Matrix& dict, const Vector& x, double lambda) {
    check_dims(y, dict, &x);
    return (y - dict * x).squaredNorm() + lambda * x.lpNorm<1>();
}

double lasso_kkt_residual(const Vector& y, const Matrix& dict, const Vector& x, double lambda) {
    check_dims(y, dict, &x);
    const Vector grad = 2.0 * dict.transpose() * (dict * x - y);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) worst = std::max(worst, violation(grad(j), x(j), lambda));
    return worst;
}

LassoSolver::LassoSolver(Matrix dict, LassoConfig cfg) : dict_(std::move(dict)), cfg_(cfg) {
    cfg_.validate();
    if (dict_.cols() < 1) throw DimensionError("lasso: dictionary has no atoms");
    if (!dict_.allFinite()) throw NumericError("lasso: dictionary contains NaN/Inf");
    col_sq_norms_ = dict_.colwise().squaredNorm().transpose();
}

SparseCode LassoSolver::solve(const Vector& y, std::vector<double>* objective_trace) const {
    const Matrix& d = dict_;
    check_dims(y, d, nullptr);
    if (!y.allFinite()) throw NumericError("lasso: signal contains NaN/Inf");

    const Eigen::Index n = d.cols();
    const double lambda = cfg_.lambda;
    const double half_lambda = 0.5 * lambda;

    // Warm start from the solution path; coordinate descent then certifies
    // (or repairs) it.
    Vector x = Vector::Zero(n);
    {
        Vector start;
        int steps = 0;
        follow_path(y, start, steps);
        if (start.allFinite() && lasso_objective(y, d, start, lambda) <= y.squaredNorm()) x = std::move(start);
    }
    Vector residual = y - d * x;
    double l1 = x.lpNorm<1>();
    auto objective = [&] { return residual.squaredNorm() + lambda * l1; };

    // One exact minimisation of coordinate j; returns the pre-update KKT violation.
    auto update = [&](Eigen::Index j) {
        const double a = col_sq_norms_(j);
        if (a == 0.0) return 0.0;
        const double corr = d.col(j).dot(residual);
        const double pre = violation(-2.0 * corr, x(j), lambda);
        const double rho = corr + a * x(j);
        const double next = soft_threshold(rho, half_lambda) / a;
        const double delta = next - x(j);
        if (delta != 0.0) {
            residual.noalias() -= delta * d.col(j);
            l1 += std::abs(next) - std::abs(x(j));
            x(j) = next;
        }
        return pre;
    };

    SparseCode code;
    double current = objective();
    if (objective_trace) objective_trace->push_back(current);
    int sweeps = 0;
    std::vector<Eigen::Index> active;
    while (sweeps < cfg_.max_iters) {
        // Full sweep over every coordinate.
        const double before = current;
        for (Eigen::Index j = 0; j < n; ++j) update(j);
        ++sweeps;
        residual = y - d * x;
        l1 = x.lpNorm<1>();
        current = objective();
        if (objective_trace) objective_trace->push_back(current);

        const double kkt = lasso_kkt_residual(y, d, x, lambda);
        if (std::abs(before - current) < cfg_.tol * (1.0 + std::abs(current)) && kkt <= cfg_.tol) {
            code.converged = true;
            break;
        }

        // Active-set sweeps until the nonzero coordinates are optimal.
        active.clear();
        for (Eigen::Index j = 0; j < n; ++j)
            if (x(j) != 0.0) active.push_back(j);
        bool settled = active.empty();
        for (int inner = 0; inner < kActiveSweeps && !settled && sweeps < cfg_.max_iters; ++inner) {
            double worst = 0.0;
            for (Eigen::Index j : active) worst = std::max(worst, update(j));
            ++sweeps;
            current = objective();
            if (objective_trace) objective_trace->push_back(current);
            settled = worst <= 0.25 * cfg_.tol;
        }

        // Exact minimisation on the current support and sign pattern when
        // coordinate descent stalls there.
        if (!settled && polish_support(y, x, active)) {
            residual = y - d * x;
            l1 = x.lpNorm<1>();
            current = objective();
            if (objective_trace) objective_trace->push_back(current);
        }
    }

    code.coeffs = std::move(x);
    code.iterations = sweeps;
    code.objective = lasso_objective(y, d, code.coeffs, lambda);
    code.kkt_residual = lasso_kkt_residual(y, d, code.coeffs, lambda);
    if (code.kkt_residual > cfg_.tol) code.converged = false;
    return code;
}

bool LassoSolver::follow_path(const Vector& y, Vector& x, int& steps) const {
    const Matrix& d = dict_;
    const Eigen::Index n = d.cols();
    const double target = 0.5 * cfg_.lambda;
    x.setZero(n);
    steps = 0;

    Vector corr = d.transpose() * y;
    Eigen::Index first = -1;
    double level = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (col_sq_norms_(j) > 0.0 && std::abs(corr(j)) > level) {
            level = std::abs(corr(j));
            first = j;
        }
    if (first < 0 || level <= target) return true;

    std::vector<Eigen::Index> active{first};
    std::vector<char> in_active(static_cast<std::size_t>(n), 0);
    in_active[static_cast<std::size_t>(first)] = 1;
    Eigen::Index barred = -1;
    const int limit = 8 * static_cast<int>(std::max(n, d.rows())) + 16;

    while (steps < limit) {
        ++steps;
        const auto k = static_cast<Eigen::Index>(active.size());
        if (k > d.rows()) return false;
        Matrix sub(d.rows(), k);
        Vector signs(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const Eigen::Index j = active[static_cast<std::size_t>(i)];
            sub.col(i) = d.col(j);
            signs(i) = corr(j) > 0 ? 1.0 : -1.0;
        }
        const Eigen::LDLT<Matrix> ldlt(sub.transpose() * sub);
        if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12)) return false;
        const Vector dir = ldlt.solve(signs);
        const Vector slope = d.transpose() * (sub * dir);

        double gamma = level - target;
        Eigen::Index join = -1;
        std::size_t drop = active.size();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (in_active[static_cast<std::size_t>(j)] || j == barred || col_sq_norms_(j) == 0.0) continue;
            for (const double side : {1.0, -1.0}) {
                const double denom = 1.0 - side * slope(j);
                if (denom <= 1e-12) continue;
                const double g = (level - side * corr(j)) / denom;
                if (g > 0.0 && g < gamma) {
                    gamma = g;
                    join = j;
                }
            }
        }
        for (std::size_t i = 0; i < active.size(); ++i) {
            const double xi = x(active[i]);
            const double di = dir(static_cast<Eigen::Index>(i));
            if (xi * di < 0.0) {
                const double g = -xi / di;
                if (g < gamma) {
                    gamma = g;
                    join = -1;
                    drop = i;
                }
            }
        }

        for (Eigen::Index i = 0; i < k; ++i) x(active[static_cast<std::size_t>(i)]) += gamma * dir(i);
        level -= gamma;
        barred = -1;
        if (drop < active.size()) {
            x(active[drop]) = 0.0;
            in_active[static_cast<std::size_t>(active[drop])] = 0;
            barred = active[drop];
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
        } else if (join >= 0) {
            active.push_back(join);
            in_active[static_cast<std::size_t>(join)] = 1;
        } else {
            return true;
        }
        corr = d.transpose() * (y - d * x);
        if (active.empty()) {
            // Everything left the path; restart from the strongest correlation.
            level = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (col_sq_norms_(j) > 0.0 && std::abs(corr(j)) > level) {
                    level = std::abs(corr(j));
                    first = j;
                }
            if (level <= target) return true;
            active.push_back(first);
            in_active[static_cast<std::size_t>(first)] = 1;
        }
    }
    return false;
}

bool LassoSolver::polish_support(const Vector& y, Vector& x, std::vector<Eigen::Index>& support) const {
    support.clear();
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (x(j) != 0.0) support.push_back(j);
    auto gather = [&] {
        Matrix sub(dict_.rows(), static_cast<Eigen::Index>(support.size()));
        for (std::size_t i = 0; i < support.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = dict_.col(support[i]);
        return sub;
    };

    // A dependent support leaves Dx unchanged along a null direction of D_S;
    // walk that way (never raising the l1 term) until a coordinate vanishes.
    bool reduced = false;
    Matrix sub;
    Eigen::LDLT<Matrix> ldlt;
    while (!support.empty()) {
        sub = gather();
        const Eigen::Index k = sub.cols();
        if (k <= sub.rows()) {
            ldlt.compute(sub.transpose() * sub);
            if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-12) break;
        }
        Eigen::FullPivLU<Matrix> lu(sub);
        lu.setThreshold(1e-10);
        if (lu.rank() == k) return reduced;
        Vector v = lu.kernel().col(0);
        double slope = 0.0;
        for (Eigen::Index i = 0; i < k; ++i)
            slope += (x(support[static_cast<std::size_t>(i)]) > 0 ? 1.0 : -1.0) * v(i);
        if (slope > 0.0) v = -v;
        double step = std::numeric_limits<double>::infinity();
        std::size_t hit = 0;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double xi = x(support[static_cast<std::size_t>(i)]);
            if (xi * v(i) < 0.0 && -xi / v(i) < step) {
                step = -xi / v(i);
                hit = static_cast<std::size_t>(i);
            }
        }
        if (!std::isfinite(step)) return reduced;
        for (Eigen::Index i = 0; i < k; ++i) x(support[static_cast<std::size_t>(i)]) += step * v(i);
        x(support[hit]) = 0.0;
        support.erase(support.begin() + static_cast<std::ptrdiff_t>(hit));
        reduced = true;
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    if (k == 0) return reduced;

    Vector signs(k);
    Vector start(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        start(i) = x(support[static_cast<std::size_t>(i)]);
        signs(i) = start(i) > 0 ? 1.0 : -1.0;
    }
    const Vector target = ldlt.solve(sub.transpose() * y - 0.5 * cfg_.lambda * signs);
    if (!target.allFinite()) return reduced;

    // The objective is convex along start -> target; check the end point and
    // every zero crossing on the way, keep the best.
    auto value = [&](const Vector& z) { return (y - sub * z).squaredNorm() + cfg_.lambda * z.lpNorm<1>(); };
    std::vector<std::pair<double, Eigen::Index>> steps{{1.0, -1}};
    for (Eigen::Index i = 0; i < k; ++i)
        if (target(i) * start(i) < 0.0) steps.emplace_back(start(i) / (start(i) - target(i)), i);
    const double base = value(start);
    double best = base;
    Vector best_z = start;
    for (const auto& [t, crossing] : steps) {
        Vector z = start + t * (target - start);
        if (crossing >= 0) z(crossing) = 0.0;
        const double v = value(z);
        if (v < best) {
            best = v;
            best_z = std::move(z);
        }
    }
    if (!(best < base)) return reduced;
    for (Eigen::Index i = 0; i < k; ++i) x(support[static_cast<std::size_t>(i)]) = best_z(i);
    return true;
}

SparseCode solve_lasso(const Vector& y, const Matrix& dict, const LassoConfig& cfg) {
    return LassoSolver(dict, cfg).solve(y);
}

double reconstruction_error(const Vector& y, const Matrix& dict, const Vector& x) {
    check_dims(y, dict, &x);
    return (y - dict * x).norm();
}

}  // namespace adl
