#include "adl/src.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "adl/errors.hpp"

namespace adl {

std::string_view to_string(DictionaryMethod method) {
    switch (method) {
        case DictionaryMethod::Adl: return "ADL";
        case DictionaryMethod::Wd: return "WD";
        case DictionaryMethod::Random: return "RANDOM";
        case DictionaryMethod::Somd: return "SOMD";
        case DictionaryMethod::Ngasd: return "NGASD";
    }
    return "?";
}

DictionaryMethod parse_method(std::string_view text) {
    std::string up;
    for (char c : text) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (up == "ADL") return DictionaryMethod::Adl;
    if (up == "WD") return DictionaryMethod::Wd;
    if (up == "RANDOM") return DictionaryMethod::Random;
    if (up == "SOMD" || up == "SOM") return DictionaryMethod::Somd;
    if (up == "NGASD" || up == "NGAS") return DictionaryMethod::Ngasd;
    throw ConfigError("unknown dictionary method '" + std::string(text) + "'");
}

std::vector<int> Dictionary::class_histogram() const {
    std::vector<int> hist(static_cast<std::size_t>(std::max(class_count, 0)), 0);
    for (int l : atom_labels) ++hist.at(static_cast<std::size_t>(l));
    return hist;
}

void Dictionary::validate() const {
    if (atoms.cols() < 1) throw DimensionError("dictionary has no atoms");
    if (atom_labels.size() != static_cast<std::size_t>(atoms.cols()))
        throw DimensionError("dictionary: atom label count differs from atom count");
    if (source_indices.size() != atom_labels.size())
        throw DimensionError("dictionary: source index count differs from atom count");
    for (int l : atom_labels)
        if (l < 0 || l >= class_count) throw ConfigError("dictionary: atom label outside [0, class_count)");
    const bool sampled = method == DictionaryMethod::Adl || method == DictionaryMethod::Wd ||
                         method == DictionaryMethod::Random;
    if (sampled) {
        std::set<long long> seen;
        for (long long s : source_indices)
            if (s < 0 || !seen.insert(s).second)
                throw ConfigError("dictionary: sampled atoms need distinct source indices");
    }
}

ClassResiduals class_residuals(const Vector& y, const Dictionary& dict, const SparseCode& code) {
    if (y.size() != dict.atoms.rows()) throw DimensionError("class_residuals: signal length mismatch");
    if (code.coeffs.size() != dict.atoms.cols()) throw DimensionError("class_residuals: code length mismatch");

    const auto c = static_cast<Eigen::Index>(dict.class_count);
    Matrix partial = Matrix::Zero(y.size(), c);
    std::vector<char> present(static_cast<std::size_t>(c), 0);
    bool any_nonzero = false;
    for (Eigen::Index j = 0; j < dict.atoms.cols(); ++j) {
        const int l = dict.atom_labels[static_cast<std::size_t>(j)];
        present[static_cast<std::size_t>(l)] = 1;
        const double x = code.coeffs(j);
        if (x != 0.0) {
            partial.col(l).noalias() += x * dict.atoms.col(j);
            any_nonzero = true;
        }
    }

    ClassResiduals out;
    out.residuals = Vector::Constant(c, std::numeric_limits<double>::infinity());
    out.degenerate = !any_nonzero;
    double best = std::numeric_limits<double>::infinity();
    int best_label = -1;
    for (Eigen::Index i = 0; i < c; ++i) {
        if (!present[static_cast<std::size_t>(i)]) continue;
        out.residuals(i) = (y - partial.col(i)).norm();
        if (best_label < 0 || out.residuals(i) < best) {
            best = out.residuals(i);
            best_label = static_cast<int>(i);
        }
    }
    if (best_label < 0) throw DimensionError("class_residuals: dictionary has no labeled atoms");
    out.argmin_label = best_label;
    return out;
}

SrcClassifier::SrcClassifier(const Dictionary& dict, const LassoConfig& cfg)
    : dict_(&dict), solver_(dict.atoms, cfg) {
    dict.validate();
}

SrcResult SrcClassifier::classify(const Vector& y) const {
    SrcResult out;
    out.code = solver_.solve(y);
    out.residuals = class_residuals(y, *dict_, out.code);
    out.label = out.residuals.argmin_label;
    return out;
}

SrcResult src_classify(const Vector& y, const Dictionary& dict, const LassoConfig& cfg) {
    return SrcClassifier(dict, cfg).classify(y);
}

}  // namespace adl
