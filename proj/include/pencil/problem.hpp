#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pencil/expr.hpp"

namespace pencil {

using Complex = std::complex<double>;

enum class Endpoint { Left, Right };

// One boundary form  B(lambda)y = y^[p](x0) + i*beta*lambda*y^[q](x0),
// with x0 = 0 or a.  beta = 0 encodes a lambda-independent condition and is
// stored with q empty (the q = -infinity convention: p > q+2 holds, the
// other order relations do not).
struct BoundaryCondition {
    Endpoint endpoint = Endpoint::Left;
    int p = 0;
    std::optional<int> q;  // empty <=> -infinity <=> beta == 0
    Complex beta{0.0, 0.0};
};

struct ValidationError : std::runtime_error {
    enum class Kind { WrongCount, DuplicateOrder, BadOrderPair, BadInterval, BetaQMismatch };
    ValidationError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
    Kind kind;
};

// Validated problem: y'''' - (g y')' = lambda^2 y on [0,a] plus four boundary
// forms, two per endpoint, stored p-ascending per endpoint
// (bcs[0],bcs[1] left; bcs[2],bcs[3] right).
struct ProblemSpec {
    double a = 1.0;
    Expr g;
    std::string g_text;
    std::array<BoundaryCondition, 4> bcs;

    const BoundaryCondition& left(int i) const { return bcs[i]; }    // i = 0,1
    const BoundaryCondition& right(int i) const { return bcs[2 + i]; }
};

enum class RightClass { CaseA1, CaseA2, FlexibleMissile, Other };

struct CaseLabel {
    int left_case = 0;  // 1..6 by the (p1,p2) pair; 0 = Other
    RightClass right_class = RightClass::Other;
};

// One satisfied regularity condition C(r,u); `prime` marks the C'(2,u)
// variant, `swapped` that the endpoint pair was taken in p-descending order.
struct ConditionHit {
    int r = 0;
    int u = 0;  // 0 = left endpoint, 1 = right endpoint
    bool prime = false;
    bool swapped = false;

    std::string name() const {
        return std::string("C") + (prime ? "'" : "") + "(" + std::to_string(r) + "," +
               std::to_string(u) + ")";
    }
};

struct RegularityReport {
    std::vector<ConditionHit> holds;
    bool birkhoff_regular = false;
};

// Canonicalize and check a raw description.  Throws ValidationError.
ProblemSpec validate(double a, Expr g, std::string g_text,
                     const std::vector<BoundaryCondition>& bcs);

// Truth of C(r,u) for an ordered pair (index 1+2u = first, 2+2u = second).
// r in 1..5; prime=true selects the C'(2,u) variant.
bool check_condition(const BoundaryCondition& first, const BoundaryCondition& second, int r,
                     bool prime = false);

RegularityReport classify_regularity(const ProblemSpec& spec);

CaseLabel classify_case(const ProblemSpec& spec);

std::string left_case_name(int left_case);
std::string right_class_name(RightClass rc);

}  // namespace pencil
