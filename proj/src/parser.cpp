#include "modat/parser.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "lexer.hpp"
#include "modat/model_ops.hpp"

namespace modat {

using detail::Tok;
using detail::Token;

namespace {

constexpr int kMaxNesting = 200;
constexpr std::size_t kMaxDiagnostics = 64;

struct SyntaxError {};

SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
    return SourceSpan{a.file, a.startLine, a.startCol, b.endLine, b.endCol};
}

/// Shared recursive-descent machinery for models and scenarios.
class ParserBase {
public:
    ParserBase(std::string_view text, std::string_view file)
        : tokens_(detail::tokenize(text, file)), file_(file) {}

    Diagnostics diagnostics;

protected:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& prev() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }
    bool at_end() const { return peek().kind == Tok::End; }

    const Token& advance() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    bool check(Tok k) const { return peek().kind == k; }
    bool check_kw(std::string_view kw) const {
        return peek().kind == Tok::Keyword && peek().text == kw;
    }
    bool accept(Tok k) {
        if (!check(k)) return false;
        advance();
        return true;
    }
    bool accept_kw(std::string_view kw) {
        if (!check_kw(kw)) return false;
        advance();
        return true;
    }

    void error(const SourceSpan& span, std::string code, std::string message) {
        if (diagnostics.size() >= kMaxDiagnostics) return;
        diagnostics.push_back(Diagnostic{Severity::Error, std::move(code), std::move(message), span});
    }

    [[noreturn]] void fail(std::string message) {
        const Token& t = peek();
        if (t.kind == Tok::Error) {
            error(t.span, "E103", t.text);
        } else {
            error(t.span, "E101", message + ", found " + detail::describe(t));
        }
        throw SyntaxError{};
    }

    const Token& expect(Tok k, std::string_view what) {
        if (!check(k)) fail("expected " + std::string(what));
        return advance();
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw)) fail("expected '" + std::string(kw) + "'");
    }
    const Token& expect_ident(std::string_view what) {
        if (!check(Tok::Ident)) fail("expected " + std::string(what));
        return advance();
    }

    TypeTag parse_type() {
        if (peek().kind == Tok::Keyword) {
            if (auto t = parse_type_tag(peek().text)) {
                advance();
                return *t;
            }
        }
        fail("expected a type (BOOL, INT, REAL, TIME)");
    }

    Value int_value(const Token& t, bool negative) {
        std::int64_t v = negative ? -t.integer : t.integer;
        if (v < std::numeric_limits<std::int32_t>::min() ||
            v > std::numeric_limits<std::int32_t>::max()) {
            error(t.span, "E102", "integer literal does not fit in 32 bits");
            throw SyntaxError{};
        }
        return Value::integer(static_cast<std::int32_t>(v));
    }

    /// Literal with an optional leading minus (numbers only).
    Value parse_literal() {
        bool negative = accept(Tok::Minus);
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: advance(); return int_value(t, negative);
            case Tok::Real: advance(); return Value::real(negative ? -t.real : t.real);
            case Tok::Time:
                if (negative) break;
                advance();
                return Value::time(Duration{t.integer});
            case Tok::Bool:
                if (negative) break;
                advance();
                return Value::boolean(t.boolean);
            default: break;
        }
        fail("expected a literal");
    }

    std::vector<std::string> parse_path(SourceSpan& span) {
        std::vector<std::string> path;
        const Token& first = peek();
        if (first.kind == Tok::Ident || (first.kind == Tok::Keyword &&
                                         (first.text == "self" || first.text == "system"))) {
            path.push_back(advance().text);
        } else {
            fail("expected a name");
        }
        span = first.span;
        while (check(Tok::Dot)) {
            advance();
            const Token& seg = expect_ident("a name after '.'");
            path.push_back(seg.text);
            span = merge(span, seg.span);
        }
        return path;
    }

    // expr := or ; precedence climbs through and, not, comparison, +/-, *, unary.
    ExprPtr parse_expr() { return parse_or(); }

    struct DepthGuard {
        explicit DepthGuard(ParserBase& p) : p_(p) {
            if (++p_.depth_ > kMaxNesting) {
                p_.error(p_.peek().span, "E104", "expression nested too deeply");
                throw SyntaxError{};
            }
        }
        ~DepthGuard() { --p_.depth_; }
        ParserBase& p_;
    };

    ExprPtr parse_or() {
        DepthGuard g(*this);
        ExprPtr lhs = parse_and();
        while (check_kw("or")) {
            advance();
            ExprPtr rhs = parse_and();
            SourceSpan sp = merge(lhs->span, rhs->span);
            lhs = make_binary(BinaryOp::Or, lhs, rhs, sp);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (check_kw("and")) {
            advance();
            ExprPtr rhs = parse_not();
            SourceSpan sp = merge(lhs->span, rhs->span);
            lhs = make_binary(BinaryOp::And, lhs, rhs, sp);
        }
        return lhs;
    }

    ExprPtr parse_not() {
        DepthGuard g(*this);
        if (check_kw("not")) {
            SourceSpan start = advance().span;
            ExprPtr operand = parse_not();
            SourceSpan sp = merge(start, operand->span);
            return make_unary(UnaryOp::Not, operand, sp);
        }
        return parse_cmp();
    }

    std::optional<BinaryOp> cmp_op() const {
        switch (peek().kind) {
            case Tok::EqEq: return BinaryOp::Eq;
            case Tok::NotEq: return BinaryOp::Ne;
            case Tok::Lt: return BinaryOp::Lt;
            case Tok::Le: return BinaryOp::Le;
            case Tok::Gt: return BinaryOp::Gt;
            case Tok::Ge: return BinaryOp::Ge;
            default: return std::nullopt;
        }
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        while (auto op = cmp_op()) {
            advance();
            ExprPtr rhs = parse_add();
            SourceSpan sp = merge(lhs->span, rhs->span);
            lhs = make_binary(*op, lhs, rhs, sp);
        }
        return lhs;
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (check(Tok::Plus) || check(Tok::Minus)) {
            BinaryOp op = advance().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            ExprPtr rhs = parse_mul();
            SourceSpan sp = merge(lhs->span, rhs->span);
            lhs = make_binary(op, lhs, rhs, sp);
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (check(Tok::Star)) {
            advance();
            ExprPtr rhs = parse_unary();
            SourceSpan sp = merge(lhs->span, rhs->span);
            lhs = make_binary(BinaryOp::Mul, lhs, rhs, sp);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        DepthGuard g(*this);
        if (check(Tok::Minus)) {
            const Token& minus = advance();
            const Token& t = peek();
            if (t.kind == Tok::Int) {
                advance();
                return make_literal(int_value(t, true), merge(minus.span, t.span));
            }
            if (t.kind == Tok::Real) {
                advance();
                return make_literal(Value::real(-t.real), merge(minus.span, t.span));
            }
            ExprPtr operand = parse_unary();
            SourceSpan sp = merge(minus.span, operand->span);
            return make_unary(UnaryOp::Neg, operand, sp);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: advance(); return make_literal(int_value(t, false), t.span);
            case Tok::Real: advance(); return make_literal(Value::real(t.real), t.span);
            case Tok::Time: advance(); return make_literal(Value::time(Duration{t.integer}), t.span);
            case Tok::Bool: advance(); return make_literal(Value::boolean(t.boolean), t.span);
            case Tok::LParen: {
                advance();
                ExprPtr inner = parse_expr();
                expect(Tok::RParen, "')'");
                return inner;
            }
            default: break;
        }
        SourceSpan span;
        auto path = parse_path(span);
        return make_ref(std::move(path), span);
    }

    /// Skips to the next token for which `stop` holds (or end of input).
    template <typename Pred>
    void recover(Pred stop) {
        while (!at_end() && !stop()) advance();
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::string file_;
    int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Model syntax

class ModelParser : public ParserBase {
public:
    using ParserBase::ParserBase;

    struct Parsed {
        Model model;
        std::vector<RootDecl> roots;
        // Component blocks declared with an explicit io clause.
        std::set<std::string> components;
    };

    Parsed parse() {
        Parsed out;
        if (at_end()) {
            error(peek().span, "E100", "expected top-level declaration");
            return out;
        }
        while (!at_end()) {
            std::size_t before = pos_;
            try {
                if (check_kw("block")) {
                    out.model.blocks.push_back(parse_block());
                } else if (check_kw("variant")) {
                    out.model.blocks.push_back(parse_variant());
                } else if (check_kw("system")) {
                    out.model.systemFunctions.push_back(parse_system_function());
                } else if (check_kw("root")) {
                    out.roots.push_back(parse_root());
                } else if (peek().kind == Tok::Error) {
                    fail("");
                } else {
                    error(peek().span, "E100",
                          "expected top-level declaration, found " + detail::describe(peek()));
                    throw SyntaxError{};
                }
            } catch (const SyntaxError&) {
                if (pos_ == before) advance();
                recover([&] { return top_level_start(); });
            }
        }
        return out;
    }

private:
    bool top_level_start() const {
        return check_kw("block") || check_kw("variant") || check_kw("root") ||
               (check_kw("system") && peek(1).kind == Tok::Keyword && peek(1).text == "function");
    }

    BlockDef parse_block() {
        SourceSpan start = advance().span;
        BlockDef b;
        b.name = expect_ident("a block name").text;
        expect_kw("kind");
        if (accept_kw("component")) {
            b.kind = BlockKind::Component;
            AttributeDef signal;
            signal.name = std::string(kSignal);
            signal.span = prev().span;
            if (check_kw("input") || check_kw("output") || check_kw("internal")) {
                const Token& dir = advance();
                signal.io = dir.text == "input"    ? IoDirection::Input
                            : dir.text == "output" ? IoDirection::Output
                                                   : IoDirection::None;
                signal.type = parse_type();
                signal.initial = Value::zero(signal.type);
                if (accept(Tok::Equals)) signal.initial = parse_typed_literal(signal.type);
                signal.span = merge(dir.span, prev().span);
            } else {
                signal.type = TypeTag::Bool;
                signal.initial = Value::boolean(false);
            }
            b.attributes.push_back(std::move(signal));
        } else if (accept_kw("composite")) {
            b.kind = BlockKind::Composite;
        } else {
            fail("expected 'component' or 'composite'");
        }
        parse_members(b);
        b.span = merge(start, prev().span);
        return b;
    }

    BlockDef parse_variant() {
        SourceSpan start = advance().span;
        BlockDef b;
        b.name = expect_ident("a variant name").text;
        expect_kw("of");
        b.base = expect_ident("a base block name").text;
        parse_members(b);
        b.span = merge(start, prev().span);
        return b;
    }

    FunctionDef parse_system_function() {
        SourceSpan start = advance().span;
        expect_kw("function");
        FunctionDef f;
        f.name = expect_ident("a function name").text;
        f.params = parse_params();
        f.span = merge(start, prev().span);
        return f;
    }

    RootDecl parse_root() {
        SourceSpan start = advance().span;
        RootDecl r;
        r.instance = expect_ident("a root instance name").text;
        expect(Tok::Colon, "':'");
        r.block = expect_ident("a block name").text;
        r.span = merge(start, prev().span);
        return r;
    }

    Value parse_typed_literal(TypeTag type) {
        SourceSpan start = peek().span;
        Value v = parse_literal();
        if (v.type() == TypeTag::Int && type == TypeTag::Real) return Value::real(v.as_int());
        if (v.type() != type) {
            error(merge(start, prev().span), "E102",
                  "literal of type " + std::string(to_string(v.type())) + " where " +
                      std::string(to_string(type)) + " is required");
            throw SyntaxError{};
        }
        return v;
    }

    void parse_members(BlockDef& b) {
        expect(Tok::LBrace, "'{'");
        while (!check(Tok::RBrace)) {
            if (at_end()) fail("expected '}'");
            if (check_kw("part")) {
                SourceSpan start = advance().span;
                PartDef p;
                p.name = expect_ident("a part name").text;
                expect(Tok::Colon, "':'");
                p.block = expect_ident("a block name").text;
                p.span = merge(start, prev().span);
                b.parts.push_back(std::move(p));
            } else if (check_kw("attr")) {
                SourceSpan start = advance().span;
                AttributeDef a;
                const Token& name = peek();
                if (name.kind == Tok::Ident) {
                    a.name = advance().text;
                } else {
                    fail("expected an attribute name");
                }
                expect(Tok::Colon, "':'");
                a.type = parse_type();
                a.initial = Value::zero(a.type);
                if (accept(Tok::Equals)) a.initial = parse_typed_literal(a.type);
                a.span = merge(start, prev().span);
                b.attributes.push_back(std::move(a));
            } else if (check_kw("function") || check_kw("override")) {
                b.functions.push_back(parse_function());
            } else {
                fail("expected 'part', 'attr', 'function' or '}'");
            }
        }
        advance();
    }

    std::vector<Param> parse_params() {
        std::vector<Param> params;
        expect(Tok::LParen, "'('");
        if (!check(Tok::RParen)) {
            do {
                Param p;
                p.name = expect_ident("a parameter name").text;
                expect(Tok::Colon, "':'");
                p.type = parse_type();
                params.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        return params;
    }

    FunctionDef parse_function() {
        SourceSpan start = peek().span;
        FunctionDef f;
        f.isOverride = accept_kw("override");
        expect_kw("function");
        f.name = expect_ident("a function name").text;
        f.params = parse_params();
        f.span = merge(start, prev().span);
        if (check(Tok::LBrace)) f.body = parse_behavior();
        return f;
    }

    Behavior parse_behavior() {
        Behavior beh;
        SourceSpan start = advance().span;
        expect_kw("lanes");
        do {
            const Token& t = peek();
            if (t.kind == Tok::Ident ||
                (t.kind == Tok::Keyword && (t.text == "self" || t.text == "system"))) {
                beh.lanes.push_back(advance().text);
            } else {
                fail("expected a lane name");
            }
        } while (accept(Tok::Comma));
        while (!check(Tok::RBrace)) {
            if (check_kw("node")) {
                beh.nodes.push_back(parse_node());
            } else if (check(Tok::Ident) || check_kw("start")) {
                beh.transitions.push_back(parse_transition());
            } else {
                fail("expected 'node', a transition or '}'");
            }
        }
        advance();
        beh.span = merge(start, prev().span);
        return beh;
    }

    Node parse_node() {
        SourceSpan start = advance().span;
        Node n;
        n.id = expect_ident("a node name").text;
        expect(Tok::Colon, "':'");
        if (accept_kw("call")) {
            SourceSpan pspan;
            auto path = parse_path(pspan);
            if (path.size() < 2) {
                error(pspan, "E101", "call target must be '<lane>.<function>'");
                throw SyntaxError{};
            }
            CallAction c;
            c.function = path.back();
            path.pop_back();
            c.target = std::move(path);
            expect(Tok::LParen, "'('");
            if (!check(Tok::RParen)) {
                do {
                    c.args.push_back(parse_expr());
                } while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
            n.action = std::move(c);
        } else if (accept_kw("set")) {
            n.action = SetAction{parse_assignments()};
        } else {
            fail("expected 'call' or 'set'");
        }
        if (accept_kw("entry")) n.entry = parse_assignments();
        if (accept_kw("exit")) n.exit = parse_assignments();
        n.span = merge(start, prev().span);
        return n;
    }

    std::vector<Assignment> parse_assignments() {
        std::vector<Assignment> out;
        do {
            Assignment a;
            SourceSpan pspan;
            a.target = parse_path(pspan);
            expect(Tok::Assign, "':='");
            a.value = parse_expr();
            a.span = merge(pspan, a.value->span);
            out.push_back(std::move(a));
        } while (accept(Tok::Comma));
        return out;
    }

    Transition parse_transition() {
        Transition t;
        const Token& src = advance();
        SourceSpan start = src.span;
        if (src.kind == Tok::Ident) t.source = src.text;
        expect(Tok::Arrow, "'->'");
        if (accept_kw("end")) {
            t.target.reset();
        } else {
            t.target = expect_ident("a target node or 'end'").text;
        }
        if (accept_kw("on")) {
            expect_kw("completion");
            t.kind = TransitionKind::Completion;
        } else if (accept_kw("when")) {
            t.kind = TransitionKind::Condition;
            t.condition = parse_expr();
            if (accept_kw("policy")) {
                if (accept_kw("resume")) {
                    t.policy = Policy::Resume;
                } else if (accept_kw("restart")) {
                    t.policy = Policy::Restart;
                } else if (accept_kw("continue")) {
                    t.policy = Policy::Continue;
                } else {
                    fail("expected 'resume', 'restart' or 'continue'");
                }
            }
        } else if (!t.source) {
            t.kind = TransitionKind::Start;
        } else {
            fail("expected 'on completion' or 'when'");
        }
        if (accept_kw("then")) t.operation = parse_assignments();
        t.span = merge(start, prev().span);
        return t;
    }
};

// ---------------------------------------------------------------------------
// Name resolution

class Resolver {
public:
    Resolver(Model& model, Diagnostics& diags) : m_(model), diags_(diags) {}

    void run(const std::vector<RootDecl>& roots, const SourceSpan& eof) {
        unique_blocks();
        check_members();
        if (!resolve_bases()) return;
        for (auto& b : m_.blocks) b.kind = root_kind(b);
        check_variants();
        check_parts();
        if (has_errors(diags_)) return;
        check_containment();
        check_root(roots, eof);
    }

private:
    void error(const SourceSpan& span, const char* code, std::string msg) {
        diags_.push_back(Diagnostic{Severity::Error, code, std::move(msg), span});
    }

    const BlockDef* block(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &m_.blocks[it->second];
    }

    void unique_blocks() {
        std::vector<BlockDef> kept;
        for (auto& b : m_.blocks) {
            if (index_.count(b.name)) {
                error(b.span, "E205", "block '" + b.name + "' is already defined");
                continue;
            }
            index_[b.name] = kept.size();
            kept.push_back(std::move(b));
        }
        m_.blocks = std::move(kept);

        std::set<std::string> sys;
        for (const auto& f : m_.systemFunctions) {
            if (!sys.insert(f.name).second) {
                error(f.span, "E210", "system function '" + f.name + "' is already declared");
            }
            check_params(f);
        }
    }

    void check_params(const FunctionDef& f) {
        std::set<std::string> seen;
        for (const auto& p : f.params) {
            if (!seen.insert(p.name).second) {
                error(f.span, "E208", "duplicate parameter '" + p.name + "' in '" + f.name + "'");
            }
        }
    }

    void check_members() {
        for (const auto& b : m_.blocks) {
            std::set<std::string> data;
            for (const auto& p : b.parts) {
                if (!data.insert(p.name).second) {
                    error(p.span, "E204", "duplicate part '" + p.name + "' in '" + b.name + "'");
                }
            }
            for (const auto& a : b.attributes) {
                if (!data.insert(a.name).second) {
                    error(a.span, "E208",
                          "'" + a.name + "' is declared more than once in '" + b.name + "'");
                }
            }
            std::set<std::string> fns;
            for (const auto& f : b.functions) {
                if (!fns.insert(f.name).second) {
                    error(f.span, "E208",
                          "function '" + f.name + "' is declared more than once in '" + b.name + "'");
                }
                check_params(f);
                if (f.isOverride && !b.base) {
                    error(f.span, "E209",
                          "'override' is only meaningful in a variant ('" + b.name + "' has no base)");
                }
            }
        }
    }

    bool resolve_bases() {
        bool ok = true;
        for (const auto& b : m_.blocks) {
            if (!b.base) continue;
            if (*b.base == b.name) {
                error(b.span, "E201", "variant '" + b.name + "' cannot be its own base");
                ok = false;
            } else if (!block(*b.base)) {
                error(b.span, "E200", "unknown base block '" + *b.base + "'");
                ok = false;
            }
        }
        if (!ok) return false;
        for (const auto& b : m_.blocks) {
            std::set<std::string> seen{b.name};
            const BlockDef* cur = &b;
            while (cur->base) {
                cur = block(*cur->base);
                if (!seen.insert(cur->name).second) {
                    error(b.span, "E201", "inheritance cycle through '" + b.name + "'");
                    ok = false;
                    break;
                }
            }
        }
        return ok;
    }

    BlockKind root_kind(const BlockDef& b) const {
        const BlockDef* cur = &b;
        while (cur->base) cur = block(*cur->base);
        return cur->kind;
    }

    // Effective member names of the base chain above `b` (exclusive).
    std::vector<const BlockDef*> ancestors(const BlockDef& b) const {
        std::vector<const BlockDef*> chain;
        const BlockDef* cur = &b;
        while (cur->base) {
            cur = block(*cur->base);
            chain.push_back(cur);
        }
        return chain;
    }

    void check_variants() {
        for (const auto& b : m_.blocks) {
            if (!b.base) continue;
            auto chain = ancestors(b);
            auto base_attr = [&](const std::string& n) -> const AttributeDef* {
                for (auto* a : chain)
                    if (auto* x = a->find_attribute(n)) return x;
                return nullptr;
            };
            auto base_fn = [&](const std::string& n) -> const FunctionDef* {
                for (auto* a : chain)
                    if (auto* x = a->find_function(n)) return x;
                return nullptr;
            };
            auto base_part = [&](const std::string& n) -> const PartDef* {
                for (auto* a : chain)
                    if (auto* x = a->find_part(n)) return x;
                return nullptr;
            };
            for (const auto& a : b.attributes) {
                if (auto* ba = base_attr(a.name); ba && ba->type != a.type) {
                    error(a.span, "E206",
                          "variant cannot change the type of inherited attribute '" + a.name + "'");
                }
                if (base_part(a.name)) {
                    error(a.span, "E208", "'" + a.name + "' is already an inherited part");
                }
            }
            for (const auto& p : b.parts) {
                if (base_part(p.name)) {
                    error(p.span, "E204", "part '" + p.name + "' is already inherited from '" +
                                              *b.base + "'");
                } else if (base_attr(p.name)) {
                    error(p.span, "E208", "'" + p.name + "' is already an inherited attribute");
                }
            }
            if (b.kind == BlockKind::Component) continue;
            for (const auto& f : b.functions) {
                bool inBase = base_fn(f.name) != nullptr;
                if (f.isOverride && !inBase) {
                    error(f.span, "E202", "'" + f.name + "' overrides nothing in '" + *b.base + "'");
                } else if (!f.isOverride && inBase) {
                    error(f.span, "E203", "'" + f.name + "' redeclares a function of '" + *b.base +
                                              "'; write 'override function'");
                }
            }
        }
    }

    void check_parts() {
        for (const auto& b : m_.blocks) {
            for (const auto& p : b.parts) {
                if (!block(p.block)) error(p.span, "E200", "unknown block '" + p.block + "'");
            }
        }
    }

    void check_containment() {
        try {
            check_acyclic(m_);
        } catch (const ModelError& e) {
            const BlockDef* where = nullptr;
            std::string msg = e.what();
            for (const auto& b : m_.blocks) {
                if (msg.find("'" + b.name + "'") != std::string::npos) {
                    where = &b;
                    break;
                }
            }
            error(where ? where->span : SourceSpan{file_of_model()}, "E207", msg);
        }
    }

    std::string file_of_model() const {
        return m_.blocks.empty() ? std::string{} : m_.blocks.front().span.file;
    }

    void check_root(const std::vector<RootDecl>& roots, const SourceSpan& eof) {
        if (roots.empty()) {
            error(eof, "E105", "missing 'root <instance>: <block>' declaration");
            return;
        }
        for (std::size_t i = 1; i < roots.size(); ++i) {
            error(roots[i].span, "E105", "only one root declaration is allowed");
        }
        if (!block(roots.front().block)) {
            error(roots.front().span, "E200", "unknown block '" + roots.front().block + "'");
        }
        m_.root = roots.front();
    }

    Model& m_;
    Diagnostics& diags_;
    std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Scenarios

class ScenarioParser : public ParserBase {
public:
    ScenarioParser(std::string_view text, std::string_view file, const Model& model)
        : ParserBase(text, file), model_(model) {
        try {
            tree_ = instantiate(model, model.root.block, model.root.instance);
            index(*tree_);
        } catch (const ModelError&) {
        }
    }

    std::optional<Scenario> parse() {
        Scenario sc;
        bool haveInvoke = false;
        bool haveMax = false;
        std::optional<SourceSpan> maxSpan;
        while (!at_end()) {
            std::size_t before = pos_;
            try {
                if (check_kw("invoke")) {
                    SourceSpan sp = peek().span;
                    Invocation inv = parse_invocation();
                    if (haveInvoke) {
                        error(sp, "E305", "only one 'invoke' line is allowed");
                    } else {
                        sc.invocation = std::move(inv);
                        haveInvoke = true;
                    }
                } else if (check_kw("at")) {
                    parse_at(sc);
                } else if (check_kw("maxcycles")) {
                    SourceSpan sp = advance().span;
                    const Token& n = expect(Tok::Int, "a cycle count");
                    if (n.integer > 10'000'000) {
                        error(n.span, "E300", "maxcycles is limited to 10000000");
                    }
                    sc.maxCycles = static_cast<int>(std::min<std::int64_t>(n.integer, 10'000'000));
                    haveMax = true;
                    maxSpan = merge(sp, n.span);
                } else if (peek().kind == Tok::Error) {
                    fail("");
                } else {
                    error(peek().span, "E300",
                          "expected 'invoke', 'at' or 'maxcycles', found " + detail::describe(peek()));
                    throw SyntaxError{};
                }
            } catch (const SyntaxError&) {
                if (pos_ == before) advance();
                recover([&] { return check_kw("invoke") || check_kw("at") || check_kw("maxcycles"); });
            }
        }
        (void)haveMax;
        if (!haveInvoke) {
            error(peek().span, "E305", "scenario has no 'invoke' line");
        }
        for (const auto& a : sc.assertions) {
            if (a.cycle > sc.maxCycles) {
                error(a.span, "E304", "assertion at cycle " + std::to_string(a.cycle) +
                                          " is beyond maxcycles " + std::to_string(sc.maxCycles));
            }
        }
        for (auto& d : diagnostics) {
            if (d.code == "E101" || d.code == "E100") d.code = "E300";
        }
        if (has_errors(diagnostics)) return std::nullopt;
        return sc;
    }

private:
    void index(const ObjectInstance& obj) {
        objects_[obj.path] = &obj;
        for (const auto& c : obj.children) index(c);
    }

    const ObjectInstance* object(const std::string& path) const {
        auto it = objects_.find(path);
        return it == objects_.end() ? nullptr : it->second;
    }

    Invocation parse_invocation() {
        SourceSpan start = advance().span;
        SourceSpan pspan;
        auto path = parse_path(pspan);
        Invocation inv;
        if (path.size() < 2) {
            error(pspan, "E301", "expected '<instance path>.<function>'");
            throw SyntaxError{};
        }
        inv.function = path.back();
        path.pop_back();
        inv.instancePath = join_path(path);
        expect(Tok::LParen, "'('");
        std::vector<std::pair<Value, SourceSpan>> args;
        if (!check(Tok::RParen)) {
            do {
                SourceSpan s = peek().span;
                Value v = parse_literal();
                args.emplace_back(v, merge(s, prev().span));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        inv.span = merge(start, prev().span);

        const ObjectInstance* obj = object(inv.instancePath);
        if (!obj) {
            error(pspan, "E301", "unknown instance path '" + inv.instancePath + "'");
            return inv;
        }
        auto fn = find_effective_function(model_, obj->block, inv.function);
        if (!fn || !fn->body) {
            error(pspan, "E301", "'" + obj->block + "' has no invocable function '" + inv.function + "'");
            return inv;
        }
        if (fn->params.size() != args.size()) {
            error(inv.span, "E306", "'" + inv.function + "' expects " +
                                        std::to_string(fn->params.size()) + " argument(s), got " +
                                        std::to_string(args.size()));
            return inv;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            Value v = args[i].first;
            TypeTag want = fn->params[i].type;
            if (v.type() == TypeTag::Int && want == TypeTag::Real) v = Value::real(v.as_int());
            if (v.type() != want) {
                error(args[i].second, "E302",
                      "argument '" + fn->params[i].name + "' expects " + std::string(to_string(want)));
            }
            inv.args.push_back(v);
        }
        return inv;
    }

    int parse_cycle() {
        const Token& n = expect(Tok::Int, "a cycle index");
        if (n.integer > std::numeric_limits<int>::max()) {
            error(n.span, "E300", "cycle index out of range");
            throw SyntaxError{};
        }
        return static_cast<int>(n.integer);
    }

    void parse_at(Scenario& sc) {
        SourceSpan start = advance().span;
        int cycle = parse_cycle();
        if (accept_kw("set")) {
            SourceSpan pspan;
            auto path = parse_path(pspan);
            expect(Tok::Equals, "'='");
            SourceSpan vs = peek().span;
            Value v = parse_literal();
            vs = merge(vs, prev().span);
            InputEvent ev;
            ev.cycle = cycle;
            ev.span = merge(start, prev().span);
            if (path.size() < 2 || path.back() != kSignal) {
                error(pspan, "E301", "inputs must target '<component path>.Signal'");
                return;
            }
            path.pop_back();
            ev.instancePath = join_path(path);
            const ObjectInstance* obj = object(ev.instancePath);
            if (!obj) {
                error(pspan, "E301", "unknown instance path '" + ev.instancePath + "'");
                return;
            }
            auto attrs = effective_attributes(model_, obj->block);
            const AttributeDef* sig = find_signal(attrs);
            const BlockDef* b = model_.find_block(obj->block);
            if (!sig || b->kind != BlockKind::Component) {
                error(pspan, "E301", "'" + ev.instancePath + "' is not a component");
                return;
            }
            if (sig->io != IoDirection::Input) {
                error(pspan, "E303",
                      std::string("cannot drive ") +
                          (sig->io == IoDirection::Output ? "output" : "internal signal") + " '" +
                          ev.instancePath + ".Signal'");
                return;
            }
            if (v.type() == TypeTag::Int && sig->type == TypeTag::Real) v = Value::real(v.as_int());
            if (v.type() != sig->type) {
                error(vs, "E302", "'" + ev.instancePath + ".Signal' is " +
                                      std::string(to_string(sig->type)) + ", literal is " +
                                      std::string(to_string(v.type())));
                return;
            }
            ev.value = v;
            sc.inputs.push_back(std::move(ev));
        } else if (check_kw("expect") || check_kw("forbid")) {
            bool expected = advance().text == "expect";
            Assertion a;
            a.cycle = cycle;
            a.expected = expected;
            a.expr = parse_expr();
            a.span = merge(start, prev().span);
            auto t = type_of(*a.expr);
            if (t && *t != TypeTag::Bool) {
                error(a.expr->span, "E302", "assertion must be a BOOL expression");
            }
            sc.assertions.push_back(std::move(a));
        } else {
            fail("expected 'set', 'expect' or 'forbid'");
        }
    }

    // Types a scenario expression, reporting unknown paths and mismatches.
    std::optional<TypeTag> type_of(const Expr& e) {
        if (auto* v = std::get_if<Value>(&e.node)) return v->type();
        if (auto* r = std::get_if<RefExpr>(&e.node)) {
            if (r->path.size() < 2) {
                error(e.span, "E301", "expected '<instance path>.<attribute>'");
                return std::nullopt;
            }
            std::vector<std::string> objPath(r->path.begin(), r->path.end() - 1);
            const ObjectInstance* obj = object(join_path(objPath));
            if (obj) {
                for (const auto& [name, value] : obj->variables) {
                    if (name == r->path.back()) return value.type();
                }
            }
            error(e.span, "E301", "unknown attribute '" + join_path(r->path) + "'");
            return std::nullopt;
        }
        if (auto* u = std::get_if<UnaryExpr>(&e.node)) {
            auto t = type_of(*u->operand);
            if (!t) return t;
            if (u->op == UnaryOp::Not && *t != TypeTag::Bool) {
                error(e.span, "E302", "'not' needs a BOOL operand");
                return std::nullopt;
            }
            if (u->op == UnaryOp::Neg && *t == TypeTag::Bool) {
                error(e.span, "E302", "'-' needs a numeric operand");
                return std::nullopt;
            }
            return t;
        }
        const auto& b = std::get<BinaryExpr>(e.node);
        auto l = type_of(*b.lhs);
        auto r = type_of(*b.rhs);
        if (!l || !r) return std::nullopt;
        if (*l != *r) {
            error(e.span, "E302", "operands of '" + std::string(to_string(b.op)) +
                                      "' have different types");
            return std::nullopt;
        }
        if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
            if (*l != TypeTag::Bool) error(e.span, "E302", "logical operator needs BOOL operands");
            return TypeTag::Bool;
        }
        if (is_comparison(b.op)) return TypeTag::Bool;
        if (*l == TypeTag::Bool) error(e.span, "E302", "arithmetic on BOOL");
        return l;
    }

    const Model& model_;
    std::optional<ObjectInstance> tree_;
    std::map<std::string, const ObjectInstance*> objects_;
};

}  // namespace

ModelParseResult parse_model(std::string_view text, std::string_view file) {
    ModelParseResult result;
    ModelParser parser(text, file);
    ModelParser::Parsed parsed;
    SourceSpan eof;
    try {
        parsed = parser.parse();
    } catch (const SyntaxError&) {
    }
    result.diagnostics = std::move(parser.diagnostics);
    if (has_errors(result.diagnostics)) {
        sort_diagnostics(result.diagnostics);
        return result;
    }
    // Position just past the last token, for "missing root" diagnostics.
    auto toks = detail::tokenize(text, file);
    eof = toks.back().span;
    Resolver(parsed.model, result.diagnostics).run(parsed.roots, eof);
    sort_diagnostics(result.diagnostics);
    if (!has_errors(result.diagnostics)) result.model = std::move(parsed.model);
    return result;
}

ScenarioParseResult parse_scenario(std::string_view text, const Model& model,
                                   std::string_view file) {
    ScenarioParseResult result;
    ScenarioParser parser(text, file, model);
    try {
        result.scenario = parser.parse();
    } catch (const SyntaxError&) {
    }
    result.diagnostics = std::move(parser.diagnostics);
    sort_diagnostics(result.diagnostics);
    if (has_errors(result.diagnostics)) result.scenario.reset();
    return result;
}

}  // namespace modat
