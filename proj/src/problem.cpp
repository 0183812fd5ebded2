#include "pencil/problem.hpp"

#include <algorithm>

namespace pencil {

namespace {

// Order relations between p and q+2 under the q = -infinity convention.
bool p_gt(const BoundaryCondition& b) { return !b.q || b.p > *b.q + 2; }
bool p_lt(const BoundaryCondition& b) { return b.q && b.p < *b.q + 2; }
bool p_eq(const BoundaryCondition& b) { return b.q && b.p == *b.q + 2; }

bool beta_excluded(const Complex& beta) {
    return beta == Complex(1.0, 0.0) || beta == Complex(-1.0, 0.0);
}

}  // namespace

ProblemSpec validate(double a, Expr g, std::string g_text,
                     const std::vector<BoundaryCondition>& bcs) {
    if (!(a > 0.0))
        throw ValidationError(ValidationError::Kind::BadInterval, "interval length a must be > 0");
    if (bcs.size() != 4)
        throw ValidationError(ValidationError::Kind::WrongCount,
                              "exactly 4 boundary conditions required");

    std::vector<BoundaryCondition> left, right;
    for (const auto& bc : bcs) {
        if (bc.p < 0 || bc.p > 3)
            throw ValidationError(ValidationError::Kind::BadOrderPair, "p must be in 0..3");
        bool beta_zero = bc.beta == Complex(0.0, 0.0);
        if (beta_zero != !bc.q.has_value())
            throw ValidationError(ValidationError::Kind::BetaQMismatch,
                                  "beta = 0 must coincide with absent q (and vice versa)");
        if (bc.q && (*bc.q < 0 || *bc.q >= bc.p))
            throw ValidationError(ValidationError::Kind::BadOrderPair,
                                  "q must satisfy 0 <= q < p when beta != 0");
        (bc.endpoint == Endpoint::Left ? left : right).push_back(bc);
    }
    if (left.size() != 2 || right.size() != 2)
        throw ValidationError(ValidationError::Kind::WrongCount,
                              "need exactly 2 boundary conditions per endpoint");

    for (auto* pair : {&left, &right}) {
        auto& v = *pair;
        // all p,q orders at one endpoint mutually distinct
        std::vector<int> orders{v[0].p, v[1].p};
        if (v[0].q) orders.push_back(*v[0].q);
        if (v[1].q) orders.push_back(*v[1].q);
        std::sort(orders.begin(), orders.end());
        if (std::adjacent_find(orders.begin(), orders.end()) != orders.end())
            throw ValidationError(ValidationError::Kind::DuplicateOrder,
                                  "orders p,q at one endpoint must be mutually distinct");
        if (v[0].p > v[1].p) std::swap(v[0], v[1]);
    }

    ProblemSpec spec;
    spec.a = a;
    spec.g = std::move(g);
    spec.g_text = std::move(g_text);
    spec.bcs = {left[0], left[1], right[0], right[1]};
    return spec;
}

bool check_condition(const BoundaryCondition& b1, const BoundaryCondition& b2, int r, bool prime) {
    if (prime) {
        // C'(2,u): mirrored variant of C(2,u) (the two are redundant)
        return r == 2 && p_lt(b1) && p_gt(b2);
    }
    switch (r) {
        case 1: return p_gt(b1) && p_gt(b2);
        case 2: return p_gt(b1) && p_lt(b2);
        case 3: return p_gt(b1) && p_eq(b2) && !beta_excluded(b2.beta);
        case 4: return p_lt(b1) && p_lt(b2);
        case 5: return p_lt(b1) && p_eq(b2) && !beta_excluded(b2.beta);
        default: return false;
    }
}

RegularityReport classify_regularity(const ProblemSpec& spec) {
    RegularityReport report;
    bool per_endpoint[2] = {false, false};
    for (int u = 0; u < 2; ++u) {
        const BoundaryCondition& first = spec.bcs[2 * u];
        const BoundaryCondition& second = spec.bcs[2 * u + 1];
        for (bool swapped : {false, true}) {
            const auto& b1 = swapped ? second : first;
            const auto& b2 = swapped ? first : second;
            for (int r = 1; r <= 5; ++r) {
                if (check_condition(b1, b2, r)) {
                    report.holds.push_back({r, u, false, swapped});
                    per_endpoint[u] = true;
                }
            }
            if (check_condition(b1, b2, 2, /*prime=*/true)) {
                report.holds.push_back({2, u, true, swapped});
                per_endpoint[u] = true;
            }
        }
    }
    report.birkhoff_regular = per_endpoint[0] && per_endpoint[1];
    return report;
}

CaseLabel classify_case(const ProblemSpec& spec) {
    CaseLabel label;

    const int p1 = spec.left(0).p, p2 = spec.left(1).p;
    static const std::pair<int, int> pairs[6] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int c = 0; c < 6; ++c)
        if (pairs[c] == std::make_pair(p1, p2)) label.left_case = c + 1;

    const auto& r0 = spec.right(0);
    const auto& r1 = spec.right(1);
    auto pq = [](const BoundaryCondition& b) {
        return std::make_pair(b.p, b.q.value_or(-100));
    };
    bool right_beta_zero = r0.beta == 0.0 && r1.beta == 0.0;
    if (pq(r0) == std::make_pair(1, 0) && pq(r1) == std::make_pair(3, 2) && r0.beta != 0.0 &&
        r1.beta != 0.0)
        label.right_class = RightClass::CaseA1;
    else if (pq(r0) == std::make_pair(2, 1) && pq(r1) == std::make_pair(3, 0) && r0.beta != 0.0 &&
             r1.beta != 0.0)
        label.right_class = RightClass::CaseA2;
    else if (right_beta_zero && p1 == 2 && p2 == 3 && r0.p == 2 && r1.p == 3)
        label.right_class = RightClass::FlexibleMissile;

    return label;
}

std::string left_case_name(int left_case) {
    return left_case >= 1 && left_case <= 6 ? "case " + std::to_string(left_case) : "other";
}

std::string right_class_name(RightClass rc) {
    switch (rc) {
        case RightClass::CaseA1: return "CaseA1";
        case RightClass::CaseA2: return "CaseA2";
        case RightClass::FlexibleMissile: return "FlexibleMissile";
        case RightClass::Other: return "Other";
    }
    return "Other";
}

}  // namespace pencil
