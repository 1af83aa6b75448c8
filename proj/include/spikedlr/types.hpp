#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spikedlr {

// The six models. SMD uses no degrees of freedom; PCA/REG0 use n1 only;
// SigD/REG/CCA use both n1 and n2.
enum class CaseId { SMD, PCA, SigD, REG0, REG, CCA };

const char* to_string(CaseId c);
CaseId case_from_string(const std::string& s);

// Input/configuration problems. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical-domain problems (parameter outside the math's domain,
// non-PD matrix, branch violations). CLI exit code 3.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature / series failed to reach the requested tolerance.
class ToleranceError : public DomainError {
public:
    using DomainError::DomainError;
};

struct CaseSpec {
    CaseId case_id = CaseId::SMD;
    int p = 0;
    int n1 = 0;  // placeholder for SMD
    int n2 = 0;  // only SigD/REG/CCA

    double c1() const { return static_cast<double>(p) / n1; }
    double c2() const { return static_cast<double>(p) / n2; }
    double n() const { return static_cast<double>(n1) + n2; }

    bool uses_n1() const { return case_id != CaseId::SMD; }
    bool two_wishart() const {
        return case_id == CaseId::SigD || case_id == CaseId::REG ||
               case_id == CaseId::CCA;
    }

    // p >= 1; p < n1 (c1 in (0,1)) when n1 is used; p <= n2 (c2 in (0,1])
    // for the two-Wishart cases. Throws ValidationError.
    void validate() const;
};

}  // namespace spikedlr
