#pragma once

// Independent reference computations used to check the library. None of
// these call the code under test for the quantity they verify.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adl/data.hpp"
#include "adl/src.hpp"

namespace adl::testing {

struct OracleSolution {
    Vector x;
    double objective = 0.0;
};

/// Global lasso minimum by enumerating every sign pattern in {-1, 0, +1}^n,
/// solving each pattern's stationarity equations and keeping the best
/// sign-consistent candidate. Exponential; meant for n <= 10.
OracleSolution lasso_sign_pattern_oracle(const Vector& y, const Matrix& d, double lambda);

/// ||y - Dx||^2 + lambda * ||x||_1 written out with plain loops.
double lasso_objective_loops(const Vector& y, const Matrix& d, const Vector& x, double lambda);

/// Worst subgradient violation, written out with plain loops.
double kkt_violation_loops(const Vector& y, const Matrix& d, const Vector& x, double lambda);

struct EigenPairs {
    std::vector<double> values;           // descending
    std::vector<std::vector<double>> vectors;  // vectors[j] pairs with values[j]
};

/// Population covariance of the columns of `x` (rows are variables).
std::vector<std::vector<double>> covariance_loops(const Matrix& x);

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
EigenPairs jacobi_eigen(std::vector<std::vector<double>> a);

/// Class-wise residual norms recomputed from the code by direct summation.
std::vector<double> class_residuals_loops(const Vector& y, const Dictionary& dict, const Vector& x);

/// Gaussian blobs: `per_class` samples around `classes` centres in `dim`
/// dimensions, centres spread `separation` apart.
Dataset gaussian_blobs(int dim, int classes, int per_class, double separation, std::uint64_t seed);

// Shrinks feature 0 and plants a near-DBL_MAX value in sample 0, so the fold
// holding that sample in its test split overflows during standardization.
Dataset with_overflowing_sample(Dataset ds);

/// Random matrix with standard normal entries.
Matrix normal_matrix(int rows, int cols, std::uint64_t seed);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace adl::testing
