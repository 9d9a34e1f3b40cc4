#include "ltlpsi/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace ltlpsi {

// ===========================================================================
// Binding expressions
// ===========================================================================

BindingExpr binding_leaf(int index) {
    auto n = std::make_shared<BindingExprNode>();
    n->op = BindingOp::Leaf;
    n->binding = index;
    return n;
}

static BindingExpr binding_nary(BindingOp op, std::vector<BindingExpr> children) {
    assert(op != BindingOp::Leaf);
    std::vector<BindingExpr> flat;
    for (auto& c : children) {
        if (c->op == op)
            flat.insert(flat.end(), c->children.begin(), c->children.end());
        else
            flat.push_back(std::move(c));
    }
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<BindingExprNode>();
    n->op = op;
    n->children = std::move(flat);
    return n;
}

BindingExpr binding_and(std::vector<BindingExpr> children) {
    return binding_nary(BindingOp::And, std::move(children));
}

BindingExpr binding_or(std::vector<BindingExpr> children) {
    return binding_nary(BindingOp::Or, std::move(children));
}

bool binding_expr_equal(const BindingExpr& a, const BindingExpr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    if (a->op == BindingOp::Leaf) return a->binding == b->binding;
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!binding_expr_equal(a->children[i], b->children[i])) return false;
    return true;
}

bool binding_expr_eval(const BindingExpr& e, BindingSet assignment) {
    switch (e->op) {
        case BindingOp::Leaf: return binding_set_contains(assignment, e->binding);
        case BindingOp::And:
            for (const auto& c : e->children)
                if (!binding_expr_eval(c, assignment)) return false;
            return true;
        case BindingOp::Or:
            for (const auto& c : e->children)
                if (binding_expr_eval(c, assignment)) return true;
            return false;
    }
    return false;
}

BindingSet binding_expr_support(const BindingExpr& e) {
    if (e->op == BindingOp::Leaf) return BindingSet{1} << e->binding;
    BindingSet s = 0;
    for (const auto& c : e->children) s |= binding_expr_support(c);
    return s;
}

static std::string binding_expr_print(const BindingExpr& e, const BindingUniverse& u, int required) {
    int prec = e->op == BindingOp::Leaf ? 3 : (e->op == BindingOp::And ? 2 : 1);
    std::string s;
    switch (e->op) {
        case BindingOp::Leaf: s = std::to_string(u.external_id(e->binding)); break;
        case BindingOp::And: {
            bool first = true;
            for (const auto& c : e->children) {
                if (!first) s += " & ";
                first = false;
                s += binding_expr_print(c, u, 3);
            }
            break;
        }
        case BindingOp::Or: {
            bool first = true;
            for (const auto& c : e->children) {
                if (!first) s += " | ";
                first = false;
                s += binding_expr_print(c, u, 2);
            }
            break;
        }
    }
    if (prec < required) return "(" + s + ")";
    return s;
}

std::string binding_expr_to_string(const BindingExpr& e, const BindingUniverse& u) {
    return binding_expr_print(e, u, 0);
}

std::vector<BindingSet> zeta(const BindingExpr& psi, const BindingUniverse& u) {
    std::vector<BindingSet> out;
    BindingSet full = u.full_mask();
    for (BindingSet k = 0; ; ++k) {
        if (binding_expr_eval(psi, k)) out.push_back(k);
        if (k == full) break;
    }
    return out;
}

// ===========================================================================
// Formula builders
// ===========================================================================

static Formula make(FOp op, std::vector<Formula> children = {}) {
    auto n = std::make_shared<FormulaNode>();
    n->op = op;
    n->children = std::move(children);
    return n;
}

Formula f_true() { return make(FOp::True); }
Formula f_false() { return make(FOp::False); }

Formula f_atom(ActionId a) {
    auto n = std::make_shared<FormulaNode>();
    n->op = FOp::Atom;
    n->atom = a;
    return n;
}

Formula f_bind(Formula phi, BindingExpr psi) {
    auto n = std::make_shared<FormulaNode>();
    n->op = FOp::Bind;
    n->psi = std::move(psi);
    n->children = {std::move(phi)};
    return n;
}

Formula f_not(Formula f) { return make(FOp::Not, {std::move(f)}); }

Formula f_outer_not(Formula bind) {
    assert(bind->op == FOp::Bind);
    return make(FOp::OuterNot, {std::move(bind)});
}

static Formula f_nary(FOp op, std::vector<Formula> children) {
    std::vector<Formula> flat;
    for (auto& c : children) {
        if (c->op == op)
            flat.insert(flat.end(), c->children.begin(), c->children.end());
        else
            flat.push_back(std::move(c));
    }
    if (flat.size() == 1) return flat[0];
    return make(op, std::move(flat));
}

Formula f_and(std::vector<Formula> children) { return f_nary(FOp::And, std::move(children)); }
Formula f_or(std::vector<Formula> children) { return f_nary(FOp::Or, std::move(children)); }
Formula f_next(Formula f) { return make(FOp::Next, {std::move(f)}); }
Formula f_until(Formula lhs, Formula rhs) { return make(FOp::Until, {std::move(lhs), std::move(rhs)}); }
Formula f_release(Formula lhs, Formula rhs) { return make(FOp::Release, {std::move(lhs), std::move(rhs)}); }
Formula f_always(Formula f) { return make(FOp::Always, {std::move(f)}); }
Formula f_eventually(Formula f) { return make(FOp::Eventually, {std::move(f)}); }

bool formula_equal(const Formula& a, const Formula& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op || a->atom != b->atom) return false;
    if ((a->psi == nullptr) != (b->psi == nullptr)) return false;
    if (a->psi && !binding_expr_equal(a->psi, b->psi)) return false;
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!formula_equal(a->children[i], b->children[i])) return false;
    return true;
}

bool contains_binding(const Formula& f) {
    if (f->op == FOp::Bind) return true;
    for (const auto& c : f->children)
        if (contains_binding(c)) return true;
    return false;
}

// ===========================================================================
// Lexer
// ===========================================================================

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Caret,
    Amp,
    Pipe,
    Bang,
    Arrow,
    KwUntil,
    KwEventually,
    KwAlways,
    KwNext,
    KwTrue,
    KwFalse,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long value = 0;  // Int only
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return cur_; }

    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
        cur_ = Token{};
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= text_.size()) {
            cur_.kind = Tok::End;
            return;
        }
        char c = text_[pos_];
        auto bump = [&](std::size_t n) {
            pos_ += n;
            col_ += static_cast<int>(n);
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
                ++col_;
            }
            cur_.text = text_.substr(start, pos_ - start);
            if (cur_.text == "U")
                cur_.kind = Tok::KwUntil;
            else if (cur_.text == "F")
                cur_.kind = Tok::KwEventually;
            else if (cur_.text == "G")
                cur_.kind = Tok::KwAlways;
            else if (cur_.text == "X")
                cur_.kind = Tok::KwNext;
            else if (cur_.text == "true")
                cur_.kind = Tok::KwTrue;
            else if (cur_.text == "false")
                cur_.kind = Tok::KwFalse;
            else
                cur_.kind = Tok::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++col_;
            }
            cur_.kind = Tok::Int;
            cur_.text = text_.substr(start, pos_ - start);
            cur_.value = std::stol(cur_.text);
            return;
        }
        switch (c) {
            case '(': cur_.kind = Tok::LParen; bump(1); return;
            case ')': cur_.kind = Tok::RParen; bump(1); return;
            case '{': cur_.kind = Tok::LBrace; bump(1); return;
            case '}': cur_.kind = Tok::RBrace; bump(1); return;
            case '^': cur_.kind = Tok::Caret; bump(1); return;
            case '&': cur_.kind = Tok::Amp; bump(1); return;
            case '|': cur_.kind = Tok::Pipe; bump(1); return;
            case '!': cur_.kind = Tok::Bang; bump(1); return;
            case '-':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                    cur_.kind = Tok::Arrow;
                    bump(2);
                    return;
                }
                throw ParseError("unexpected character '-'", line_, col_);
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token cur_;
};

// ===========================================================================
// Parser
// ===========================================================================

struct Parsed {
    Formula node;
    // True when the node came verbatim from a parenthesized group, so that a
    // preceding '!' treats an annotated block as a whole (outer negation).
    bool parenthesized = false;
};

class Parser {
public:
    Parser(const std::string& text, const Vocab& vocab) : lex_(text), vocab_(vocab) {}

    Formula parse() {
        Formula f = parse_implies().node;
        expect(Tok::End, "end of input");
        return f;
    }

    BindingExpr parse_binding_only() {
        BindingExpr e = parse_binding_or();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, const Token& at) {
        throw ParseError(msg, at.line, at.col);
    }

    Token expect(Tok kind, const std::string& what) {
        if (lex_.peek().kind != kind) fail("expected " + what, lex_.peek());
        return lex_.take();
    }

    // --- task-level negation used by '->' desugaring -----------------------

    Formula negate_for_implication(const Formula& f, const Token& at) {
        if (!contains_binding(f)) return f_not(f);
        switch (f->op) {
            case FOp::Bind: return f_outer_not(f);
            case FOp::OuterNot: return f->children[0];
            case FOp::And: {
                std::vector<Formula> cs;
                for (const auto& c : f->children) cs.push_back(negate_for_implication(c, at));
                return f_or(std::move(cs));
            }
            case FOp::Or: {
                std::vector<Formula> cs;
                for (const auto& c : f->children) cs.push_back(negate_for_implication(c, at));
                return f_and(std::move(cs));
            }
            default:
                fail("left side of '->' cannot be negated: temporal structure over annotated "
                     "formulas has no negation in the grammar",
                     at);
        }
    }

    // --- grammar ------------------------------------------------------------

    Parsed parse_implies() {
        Parsed lhs = parse_or();
        if (lex_.peek().kind == Tok::Arrow) {
            Token arrow = lex_.take();
            Parsed rhs = parse_implies();  // right-associative
            if (lhs.node->op == FOp::True) return {rhs.node, false};
            Formula neg = negate_for_implication(lhs.node, arrow);
            return {f_or({neg, rhs.node}), false};
        }
        return lhs;
    }

    Parsed parse_or() {
        Parsed first = parse_and();
        if (lex_.peek().kind != Tok::Pipe) return first;
        std::vector<Formula> cs{first.node};
        while (lex_.peek().kind == Tok::Pipe) {
            lex_.take();
            cs.push_back(parse_and().node);
        }
        return {f_or(std::move(cs)), false};
    }

    Parsed parse_and() {
        Parsed first = parse_until();
        if (lex_.peek().kind != Tok::Amp) return first;
        std::vector<Formula> cs{first.node};
        while (lex_.peek().kind == Tok::Amp) {
            lex_.take();
            cs.push_back(parse_until().node);
        }
        return {f_and(std::move(cs)), false};
    }

    Parsed parse_until() {
        Parsed lhs = parse_unary();
        if (lex_.peek().kind == Tok::KwUntil) {
            lex_.take();
            Parsed rhs = parse_until();  // right-associative
            return {f_until(lhs.node, rhs.node), false};
        }
        return lhs;
    }

    Parsed parse_unary() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Tok::Bang: {
                Token bang = lex_.take();
                Parsed operand = parse_unary();
                return {apply_not(operand, bang), false};
            }
            case Tok::KwEventually: {
                lex_.take();
                return {f_eventually(parse_unary().node), false};
            }
            case Tok::KwAlways: {
                lex_.take();
                return {f_always(parse_unary().node), false};
            }
            case Tok::KwNext: {
                lex_.take();
                return {f_next(parse_unary().node), false};
            }
            default: return parse_postfix();
        }
    }

    Formula apply_not(const Parsed& operand, const Token& bang) {
        const Formula& f = operand.node;
        if (f->op == FOp::Bind) {
            if (operand.parenthesized) return f_outer_not(f);  // !(p^{1})
            // !p^{1} reads as (!p)^{1}: the negation moves inside the annotation.
            return f_bind(f_not(f->children[0]), f->psi);
        }
        if (f->op == FOp::OuterNot) return f->children[0];  // double task-level negation
        if (contains_binding(f))
            fail("'!' at task level applies only to a single annotated block", bang);
        return f_not(f);
    }

    Parsed parse_postfix() {
        Parsed p = parse_primary();
        while (lex_.peek().kind == Tok::Caret) {
            Token caret = lex_.take();
            if (contains_binding(p.node))
                fail("operand of '^' already carries a binding annotation", caret);
            BindingExpr psi = parse_binding_annotation();
            p = {f_bind(p.node, std::move(psi)), false};
        }
        return p;
    }

    Parsed parse_primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Tok::LParen: {
                Parsed inner = parse_implies();
                expect(Tok::RParen, "')'");
                return {inner.node, true};
            }
            case Tok::Ident: {
                auto id = vocab_.actions.lookup(t.text);
                if (!id) fail("unknown action proposition '" + t.text + "'", t);
                return {f_atom(*id), false};
            }
            case Tok::KwTrue: return {f_true(), false};
            case Tok::KwFalse: return {f_false(), false};
            default: fail("expected an atom, 'true', or '('", t);
        }
    }

    // --- binding expressions -------------------------------------------------

    BindingExpr parse_binding_annotation() {
        if (lex_.peek().kind == Tok::Int) {
            Token t = lex_.take();
            return binding_leaf(lookup_binding(t));
        }
        expect(Tok::LBrace, "'{' or a binding id after '^'");
        BindingExpr e = parse_binding_or();
        expect(Tok::RBrace, "'}'");
        return e;
    }

    BindingExpr parse_binding_or() {
        std::vector<BindingExpr> cs{parse_binding_and()};
        while (lex_.peek().kind == Tok::Pipe) {
            lex_.take();
            cs.push_back(parse_binding_and());
        }
        return binding_or(std::move(cs));
    }

    BindingExpr parse_binding_and() {
        std::vector<BindingExpr> cs{parse_binding_primary()};
        while (lex_.peek().kind == Tok::Amp) {
            lex_.take();
            cs.push_back(parse_binding_primary());
        }
        return binding_and(std::move(cs));
    }

    BindingExpr parse_binding_primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Tok::Int: return binding_leaf(lookup_binding(t));
            case Tok::LParen: {
                BindingExpr e = parse_binding_or();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Bang: fail("binding expressions are negation-free", t);
            default: fail("expected a binding id or '('", t);
        }
    }

    int lookup_binding(const Token& t) {
        auto idx = vocab_.bindings.index_of(static_cast<int>(t.value));
        if (!idx) fail("unknown binding proposition '" + t.text + "'", t);
        return *idx;
    }

    Lexer lex_;
    const Vocab& vocab_;
};

// ===========================================================================
// Validation: every atom sits under exactly one annotation; annotations are
// not nested; OuterNot applies only to annotated blocks.
// ===========================================================================

void validate_phi(const Formula& f, const Vocab& vocab) {
    switch (f->op) {
        case FOp::True:
        case FOp::False:
        case FOp::Atom: return;
        case FOp::Bind:
            throw ParseError("binding annotation nested inside another annotation", 1, 1);
        case FOp::OuterNot:
            throw ParseError("task-level negation inside an annotation", 1, 1);
        default:
            for (const auto& c : f->children) validate_phi(c, vocab);
            return;
    }
}

const FormulaNode* find_unbound_atom(const Formula& f) {
    switch (f->op) {
        case FOp::Atom: return f.get();
        case FOp::Bind: return nullptr;  // the subtree is covered by this annotation
        default:
            for (const auto& c : f->children)
                if (const auto* a = find_unbound_atom(c)) return a;
            return nullptr;
    }
}

void validate_task(const Formula& f, const Vocab& vocab) {
    switch (f->op) {
        case FOp::True:
        case FOp::False: return;
        case FOp::Atom:
            throw ParseError(
                "atom '" + vocab.actions.name(f->atom) + "' lacks a binding annotation", 1, 1);
        case FOp::Bind: validate_phi(f->children[0], vocab); return;
        case FOp::OuterNot:
            if (f->children[0]->op != FOp::Bind)
                throw ParseError("task-level negation applies only to an annotated block", 1, 1);
            validate_phi(f->children[0]->children[0], vocab);
            return;
        case FOp::Not: {
            // A bare negation at task level means some atom escaped annotation.
            if (const auto* a = find_unbound_atom(f))
                throw ParseError(
                    "atom '" + vocab.actions.name(a->atom) + "' lacks a binding annotation", 1, 1);
            throw ParseError("negation at task level applies only to an annotated block", 1, 1);
        }
        default:
            for (const auto& c : f->children) validate_task(c, vocab);
            return;
    }
}

} // namespace

Formula parse_task(const std::string& text, const Vocab& vocab) {
    Parser p(text, vocab);
    Formula f = p.parse();
    validate_task(f, vocab);
    return f;
}

BindingExpr parse_binding_expr(const std::string& text, const BindingUniverse& u) {
    Vocab v;
    v.bindings = u;
    Parser p(text, v);
    return p.parse_binding_only();
}

// ===========================================================================
// Printing
// ===========================================================================

namespace {

int fop_prec(FOp op) {
    switch (op) {
        case FOp::Or: return 1;
        case FOp::And: return 2;
        case FOp::Until:
        case FOp::Release: return 3;
        case FOp::Not:
        case FOp::Next:
        case FOp::Always:
        case FOp::Eventually: return 4;
        default: return 5;  // atoms, true/false, Bind, OuterNot
    }
}

std::string print_rec(const Formula& f, const Vocab& vocab, int required);

// Children of n-ary operators: Until/Release are always parenthesized when
// they appear under another operator.
std::string print_child(const Formula& c, const Vocab& vocab, int required) {
    if (c->op == FOp::Until || c->op == FOp::Release) required = 4;
    return print_rec(c, vocab, required);
}

std::string print_rec(const Formula& f, const Vocab& vocab, int required) {
    std::string s;
    switch (f->op) {
        case FOp::True: s = "true"; break;
        case FOp::False: s = "false"; break;
        case FOp::Atom: s = vocab.actions.name(f->atom); break;
        case FOp::Bind: {
            const Formula& phi = f->children[0];
            std::string body;
            if (phi->op == FOp::Atom) {
                body = vocab.actions.name(phi->atom);
            } else if (phi->op == FOp::Not && phi->children[0]->op == FOp::Atom) {
                body = "!" + vocab.actions.name(phi->children[0]->atom);
            } else {
                body = "(" + print_rec(phi, vocab, 0) + ")";
            }
            s = body + "^{" + binding_expr_to_string(f->psi, vocab.bindings) + "}";
            break;
        }
        case FOp::OuterNot: s = "!(" + print_rec(f->children[0], vocab, 0) + ")"; break;
        case FOp::Not: s = "!" + print_child(f->children[0], vocab, 4); break;
        case FOp::Next: s = "X(" + print_rec(f->children[0], vocab, 0) + ")"; break;
        case FOp::Always: s = "G(" + print_rec(f->children[0], vocab, 0) + ")"; break;
        case FOp::Eventually: s = "F(" + print_rec(f->children[0], vocab, 0) + ")"; break;
        case FOp::Until:
        case FOp::Release: {
            const char* op = f->op == FOp::Until ? " U " : " R ";
            s = print_child(f->children[0], vocab, 4) + op + print_child(f->children[1], vocab, 4);
            break;
        }
        case FOp::And: {
            bool first = true;
            for (const auto& c : f->children) {
                if (!first) s += " & ";
                first = false;
                s += print_child(c, vocab, 3);
            }
            break;
        }
        case FOp::Or: {
            bool first = true;
            for (const auto& c : f->children) {
                if (!first) s += " | ";
                first = false;
                s += print_child(c, vocab, 2);
            }
            break;
        }
    }
    if (fop_prec(f->op) < required) return "(" + s + ")";
    return s;
}

} // namespace

std::string print_canonical(const Formula& f, const Vocab& vocab) {
    return print_rec(f, vocab, 0);
}

std::string to_sexpr(const Formula& f, const Vocab& vocab) {
    switch (f->op) {
        case FOp::True: return "true";
        case FOp::False: return "false";
        case FOp::Atom: return vocab.actions.name(f->atom);
        case FOp::Bind:
            return "(bind " + to_sexpr(f->children[0], vocab) + " ^ " +
                   binding_expr_to_string(f->psi, vocab.bindings) + ")";
        default: {
            const char* tag = nullptr;
            switch (f->op) {
                case FOp::OuterNot: tag = "outer-not"; break;
                case FOp::Not: tag = "not"; break;
                case FOp::And: tag = "and"; break;
                case FOp::Or: tag = "or"; break;
                case FOp::Next: tag = "next"; break;
                case FOp::Until: tag = "until"; break;
                case FOp::Release: tag = "release"; break;
                case FOp::Always: tag = "always"; break;
                case FOp::Eventually: tag = "eventually"; break;
                default: tag = "?"; break;
            }
            std::string s = "(" + std::string(tag);
            for (const auto& c : f->children) s += " " + to_sexpr(c, vocab);
            return s + ")";
        }
    }
}

// ===========================================================================
// Rewriting to binding-atomic form
// ===========================================================================

namespace {

// Negation-pushing at the plain-LTL level (inside one annotation).
Formula nnf_neg(const Formula& f) {
    switch (f->op) {
        case FOp::True: return f_false();
        case FOp::False: return f_true();
        case FOp::Atom: return f_not(f);
        case FOp::Not: return f->children[0];
        case FOp::And: {
            std::vector<Formula> cs;
            for (const auto& c : f->children) cs.push_back(nnf_neg(c));
            return f_or(std::move(cs));
        }
        case FOp::Or: {
            std::vector<Formula> cs;
            for (const auto& c : f->children) cs.push_back(nnf_neg(c));
            return f_and(std::move(cs));
        }
        case FOp::Next: return f_next(nnf_neg(f->children[0]));
        case FOp::Until: return f_release(nnf_neg(f->children[0]), nnf_neg(f->children[1]));
        case FOp::Release: return f_until(nnf_neg(f->children[0]), nnf_neg(f->children[1]));
        case FOp::Always: return f_eventually(nnf_neg(f->children[0]));
        case FOp::Eventually: return f_always(nnf_neg(f->children[0]));
        default: throw Error("internal: annotation nodes inside a plain subformula");
    }
}

// Distributes a single binding proposition over plain-LTL structure.
Formula distribute(const Formula& phi, const BindingExpr& leaf) {
    switch (phi->op) {
        case FOp::True: return f_true();
        case FOp::False: return f_false();
        case FOp::Atom: return f_bind(phi, leaf);
        case FOp::Not:
            if (phi->children[0]->op == FOp::Atom) return f_bind(phi, leaf);
            return distribute(nnf_neg(phi->children[0]), leaf);
        case FOp::And: {
            std::vector<Formula> cs;
            for (const auto& c : phi->children) cs.push_back(distribute(c, leaf));
            return f_and(std::move(cs));
        }
        case FOp::Or: {
            std::vector<Formula> cs;
            for (const auto& c : phi->children) cs.push_back(distribute(c, leaf));
            return f_or(std::move(cs));
        }
        case FOp::Next: return f_next(distribute(phi->children[0], leaf));
        case FOp::Until:
            return f_until(distribute(phi->children[0], leaf), distribute(phi->children[1], leaf));
        case FOp::Release:
            return f_release(distribute(phi->children[0], leaf), distribute(phi->children[1], leaf));
        case FOp::Always: return f_always(distribute(phi->children[0], leaf));
        case FOp::Eventually: return f_eventually(distribute(phi->children[0], leaf));
        default: throw Error("internal: annotation nodes inside a plain subformula");
    }
}

// Expands the negation of an annotated block. Over the binding expression it
// follows the negation-follows-bindings laws exactly
// (not(phi^{a & b}) == not(phi^{a}) | not(phi^{b}), dually for |). At a single
// binding, negating an annotated *atom* is kept as-is; negating an annotated
// compound is replaced by the (stronger) requirement that every involved
// agent violates it, i.e. the negation moves inside the annotation and the
// positive result distributes. The strengthening direction is the sound one:
// any behavior realizing the rewritten formula satisfies the original.
Formula rewrite_outer(const Formula& phi, const BindingExpr& psi) {
    switch (psi->op) {
        case BindingOp::And: {
            std::vector<Formula> cs;
            for (const auto& c : psi->children) cs.push_back(rewrite_outer(phi, c));
            return f_or(std::move(cs));
        }
        case BindingOp::Or: {
            std::vector<Formula> cs;
            for (const auto& c : psi->children) cs.push_back(rewrite_outer(phi, c));
            return f_and(std::move(cs));
        }
        case BindingOp::Leaf:
            if (phi->op == FOp::Atom ||
                (phi->op == FOp::Not && phi->children[0]->op == FOp::Atom))
                return f_outer_not(f_bind(phi, psi));
            return distribute(nnf_neg(phi), psi);
    }
    throw Error("internal: bad binding expression");
}

Formula rewrite_bind(const Formula& phi, const BindingExpr& psi) {
    switch (psi->op) {
        case BindingOp::And: {
            std::vector<Formula> cs;
            for (const auto& c : psi->children) cs.push_back(rewrite_bind(phi, c));
            return f_and(std::move(cs));
        }
        case BindingOp::Or: {
            std::vector<Formula> cs;
            for (const auto& c : psi->children) cs.push_back(rewrite_bind(phi, c));
            return f_or(std::move(cs));
        }
        case BindingOp::Leaf: return distribute(phi, psi);
    }
    throw Error("internal: bad binding expression");
}

Formula rewrite_rec(const Formula& f) {
    switch (f->op) {
        case FOp::True:
        case FOp::False: return f;
        case FOp::Bind: return rewrite_bind(f->children[0], f->psi);
        case FOp::OuterNot: {
            const Formula& bind = f->children[0];
            return rewrite_outer(bind->children[0], bind->psi);
        }
        case FOp::And: {
            std::vector<Formula> cs;
            for (const auto& c : f->children) cs.push_back(rewrite_rec(c));
            return f_and(std::move(cs));
        }
        case FOp::Or: {
            std::vector<Formula> cs;
            for (const auto& c : f->children) cs.push_back(rewrite_rec(c));
            return f_or(std::move(cs));
        }
        case FOp::Next: return f_next(rewrite_rec(f->children[0]));
        case FOp::Until: return f_until(rewrite_rec(f->children[0]), rewrite_rec(f->children[1]));
        case FOp::Release:
            return f_release(rewrite_rec(f->children[0]), rewrite_rec(f->children[1]));
        case FOp::Always: return f_always(rewrite_rec(f->children[0]));
        case FOp::Eventually: return f_eventually(rewrite_rec(f->children[0]));
        default: throw Error("internal: unannotated atom reached the rewriter");
    }
}

} // namespace

Formula rewrite_atomic(const Formula& f) { return rewrite_rec(f); }

Formula outer_to_literal(const Formula& f) {
    if (f->op == FOp::OuterNot) {
        const Formula& bind = f->children[0];
        if (bind->op != FOp::Bind || bind->psi->op != BindingOp::Leaf)
            throw Error("literal conversion requires a binding-atomic formula");
        const Formula& phi = bind->children[0];
        if (phi->op == FOp::Atom) return f_bind(f_not(phi), bind->psi);
        if (phi->op == FOp::Not && phi->children[0]->op == FOp::Atom)
            return f_bind(phi->children[0], bind->psi);
        throw Error("literal conversion requires a binding-atomic formula");
    }
    if (f->op == FOp::Bind || f->children.empty()) return f;
    std::vector<Formula> cs;
    cs.reserve(f->children.size());
    for (const auto& c : f->children) cs.push_back(outer_to_literal(c));
    auto n = std::make_shared<FormulaNode>();
    n->op = f->op;
    n->atom = f->atom;
    n->psi = f->psi;
    n->children = std::move(cs);
    return n;
}

namespace {

bool is_atomic_bind(const Formula& f) {
    if (f->op != FOp::Bind) return false;
    if (f->psi->op != BindingOp::Leaf) return false;
    const Formula& phi = f->children[0];
    return phi->op == FOp::Atom || (phi->op == FOp::Not && phi->children[0]->op == FOp::Atom);
}

} // namespace

bool is_atomic(const Formula& f) {
    switch (f->op) {
        case FOp::True:
        case FOp::False: return true;
        case FOp::Atom:
        case FOp::Not: return false;
        case FOp::Bind: return is_atomic_bind(f);
        case FOp::OuterNot: return is_atomic_bind(f->children[0]);
        default:
            for (const auto& c : f->children)
                if (!is_atomic(c)) return false;
            return true;
    }
}

namespace {

void collect_pairs(const Formula& f, std::vector<PropPair>& out) {
    if (f->op == FOp::Bind) {
        const Formula& phi = f->children[0];
        ActionId a = phi->op == FOp::Atom ? phi->atom : phi->children[0]->atom;
        out.push_back(PropPair{a, f->psi->binding});
        return;
    }
    for (const auto& c : f->children) collect_pairs(c, out);
}

} // namespace

std::vector<PropPair> atomic_props(const Formula& f) {
    std::vector<PropPair> out;
    collect_pairs(f, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BindingSet formula_binding_support(const Formula& f) {
    if (f->op == FOp::Bind) return binding_expr_support(f->psi);
    BindingSet s = 0;
    for (const auto& c : f->children) s |= formula_binding_support(c);
    return s;
}

} // namespace ltlpsi
