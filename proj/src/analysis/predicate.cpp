#include "wfctl/analysis/predicate.hpp"

#include <cctype>

#include <fmt/format.h>

#include "common/text.hpp"
#include "wfctl/error.hpp"

namespace wfctl::analysis {

namespace {

class Parser {
public:
    explicit Parser(std::string_view source) : src_(source) {}

    StateExpr parse() {
        StateExpr expr = disjunction();
        skip();
        if (pos_ < src_.size()) fail(fmt::format("unexpected '{}'", src_[pos_]));
        return expr;
    }

private:
    StateExpr disjunction() {
        StateExpr first = conjunction();
        if (!peek_keyword("or")) return first;
        StateExpr node{StateExpr::Kind::Or, {}, 0, {std::move(first)}};
        while (accept_keyword("or")) node.operands.push_back(conjunction());
        return node;
    }

    StateExpr conjunction() {
        StateExpr first = term();
        if (!peek_keyword("and")) return first;
        StateExpr node{StateExpr::Kind::And, {}, 0, {std::move(first)}};
        while (accept_keyword("and")) node.operands.push_back(term());
        return node;
    }

    StateExpr term() {
        skip();
        if (accept('(')) {
            StateExpr inner = disjunction();
            expect(')');
            return inner;
        }
        if (!accept_keyword("mark")) fail("expected 'mark(<label>)' or '('");
        expect('(');
        skip();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != ')' && !std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected a place label");
        std::string label(src_.substr(start, pos_ - start));
        expect(')');
        skip();
        if (src_.substr(pos_, 2) != ">=") fail("expected '>='");
        pos_ += 2;
        skip();
        const std::size_t digits = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const auto value = text::to_int<pn::Count>(src_.substr(digits, pos_ - digits));
        if (!value) {
            pos_ = digits;
            fail("expected a non-negative integer");
        }
        return StateExpr{StateExpr::Kind::AtLeast, std::move(label), *value, {}};
    }

    void skip() {
        while (pos_ < src_.size()) {
            if (src_[pos_] == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(fmt::format("expected '{}'", c));
    }

    bool peek_keyword(std::string_view word) {
        skip();
        if (src_.substr(pos_, word.size()) != word) return false;
        const std::size_t after = pos_ + word.size();
        return after >= src_.size() || !(std::isalnum(static_cast<unsigned char>(src_[after])) || src_[after] == '_');
    }

    bool accept_keyword(std::string_view word) {
        if (!peek_keyword(word)) return false;
        pos_ += word.size();
        return true;
    }

    [[noreturn]] void fail(const std::string& message) const {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw Error(ErrorKind::Parse, fmt::format("line {}, column {}: {}", line, column, message),
                    static_cast<std::int64_t>(pos_ + 1));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

StateExpr parse_state_expr(std::string_view source) { return Parser(source).parse(); }

std::string to_string(const StateExpr& expr) {
    if (expr.kind == StateExpr::Kind::AtLeast) return fmt::format("mark({}) >= {}", expr.label, expr.threshold);
    std::string out;
    const char* op = expr.kind == StateExpr::Kind::And ? " and " : " or ";
    for (std::size_t i = 0; i < expr.operands.size(); ++i) {
        if (i > 0) out += op;
        const auto& child = expr.operands[i];
        const bool wrap = child.kind != StateExpr::Kind::AtLeast;
        out += wrap ? "(" + to_string(child) + ")" : to_string(child);
    }
    return out;
}

MarkingPredicate bind(const StateExpr& expr, const pn::PetriNet& net) {
    if (expr.kind == StateExpr::Kind::AtLeast) {
        const auto place = net.find_place_by_label(expr.label);
        if (!place) throw Error(ErrorKind::StructuralMismatch, "predicate names unknown place label '" + expr.label + "'");
        return [index = *place, threshold = expr.threshold](const pn::Marking& m) { return m[index] >= threshold; };
    }
    std::vector<MarkingPredicate> parts;
    for (const auto& child : expr.operands) parts.push_back(bind(child, net));
    if (expr.kind == StateExpr::Kind::And) {
        return [parts = std::move(parts)](const pn::Marking& m) {
            for (const auto& p : parts) {
                if (!p(m)) return false;
            }
            return true;
        };
    }
    return [parts = std::move(parts)](const pn::Marking& m) {
        for (const auto& p : parts) {
            if (p(m)) return true;
        }
        return false;
    };
}

}  // namespace wfctl::analysis
