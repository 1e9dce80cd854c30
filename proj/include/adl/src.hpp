#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adl/lasso.hpp"

namespace adl {

enum class DictionaryMethod { Adl, Wd, Random, Somd, Ngasd };

std::string_view to_string(DictionaryMethod method);
/// Accepts ADL/WD/RANDOM/SOMD/NGASD and the short forms som/ngas, case-insensitive.
DictionaryMethod parse_method(std::string_view text);

/// source_indices value for atoms that are not training samples (cluster centres).
inline constexpr long long kSyntheticSource = -1;

/// Labeled dictionary: atom j is column j of `atoms` and belongs to class atom_labels[j].
struct Dictionary {
    Matrix atoms;
    std::vector<int> atom_labels;
    std::vector<long long> source_indices;
    DictionaryMethod method = DictionaryMethod::Wd;
    std::uint64_t build_seed = 0;
    int class_count = 0;
    std::vector<std::string> class_names;

    [[nodiscard]] int size() const { return static_cast<int>(atoms.cols()); }
    [[nodiscard]] int dim() const { return static_cast<int>(atoms.rows()); }
    [[nodiscard]] std::vector<int> class_histogram() const;

    /// Throws DimensionError/ConfigError on broken invariants.
    void validate() const;
};

/// r_i(y) for every class id; classes without atoms hold +infinity.
struct ClassResiduals {
    Vector residuals;
    int argmin_label = 0;
    /// The code had no nonzero coefficient, so every present class tied at ||y||.
    bool degenerate = false;
};

ClassResiduals class_residuals(const Vector& y, const Dictionary& dict, const SparseCode& code);

struct SrcResult {
    int label = 0;
    ClassResiduals residuals;
    SparseCode code;
};

/// Codes `y` against the dictionary and labels it by the smallest class-wise
/// residual, breaking ties toward the lower class id.
class SrcClassifier {
public:
    SrcClassifier(const Dictionary& dict, const LassoConfig& cfg);

    [[nodiscard]] SrcResult classify(const Vector& y) const;
    [[nodiscard]] const Dictionary& dictionary() const { return *dict_; }
    [[nodiscard]] const LassoSolver& solver() const { return solver_; }

private:
    const Dictionary* dict_;
    LassoSolver solver_;
};

SrcResult src_classify(const Vector& y, const Dictionary& dict, const LassoConfig& cfg);

}  // namespace adl
