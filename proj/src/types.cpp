#include "spikedlr/types.hpp"

#include <algorithm>
#include <cctype>

namespace spikedlr {

const char* to_string(CaseId c) {
    switch (c) {
        case CaseId::SMD: return "SMD";
        case CaseId::PCA: return "PCA";
        case CaseId::SigD: return "SigD";
        case CaseId::REG0: return "REG0";
        case CaseId::REG: return "REG";
        case CaseId::CCA: return "CCA";
    }
    return "?";
}

CaseId case_from_string(const std::string& s) {
    std::string t;
    t.reserve(s.size());
    for (char ch : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (t == "smd") return CaseId::SMD;
    if (t == "pca") return CaseId::PCA;
    if (t == "sigd") return CaseId::SigD;
    if (t == "reg0") return CaseId::REG0;
    if (t == "reg") return CaseId::REG;
    if (t == "cca") return CaseId::CCA;
    throw ValidationError("unknown case id '" + s + "' (expected one of smd, pca, sigd, reg0, reg, cca)");
}

void CaseSpec::validate() const {
    if (p < 1) throw ValidationError("p must be a positive integer");
    if (uses_n1()) {
        if (n1 <= p)
            throw ValidationError(std::string(to_string(case_id)) +
                                  " requires p < n1 (c1 in (0,1)); got p=" + std::to_string(p) +
                                  ", n1=" + std::to_string(n1));
    }
    if (two_wishart()) {
        if (n2 < p)
            throw ValidationError(std::string(to_string(case_id)) +
                                  " requires p <= n2 (c2 in (0,1]); got p=" + std::to_string(p) +
                                  ", n2=" + std::to_string(n2));
    }
}

}  // namespace spikedlr
