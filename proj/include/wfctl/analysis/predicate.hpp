#pragma once

// Forbidden-state expressions:
//
//   expr  := conj ("or" conj)*
//   conj  := term ("and" term)*
//   term  := "mark" "(" label ")" ">=" integer | "(" expr ")"
//
// Labels are place labels of the net the expression is bound to. Parse
// failures are Error{Parse} carrying "line L, column C" and detail() = the
// 1-based character offset.

#include <string>
#include <string_view>
#include <vector>

#include "wfctl/analysis/reachability.hpp"
#include "wfctl/pn/net.hpp"

namespace wfctl::analysis {

struct StateExpr {
    enum class Kind { AtLeast, And, Or };
    Kind kind = Kind::AtLeast;
    std::string label;          // AtLeast
    pn::Count threshold = 0;    // AtLeast
    std::vector<StateExpr> operands;  // And / Or

    bool operator==(const StateExpr&) const = default;
};

StateExpr parse_state_expr(std::string_view source);
std::string to_string(const StateExpr& expr);

// Resolves labels against net; unknown labels throw StructuralMismatch.
MarkingPredicate bind(const StateExpr& expr, const pn::PetriNet& net);

}  // namespace wfctl::analysis
