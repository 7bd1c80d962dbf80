#include "modat/model.hpp"

#include <algorithm>

namespace modat {

bool is_comparison(BinaryOp op) {
    switch (op) {
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return true;
        default: return false;
    }
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return "or";
        case BinaryOp::And: return "and";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
    }
    return "?";
}

ExprPtr make_literal(Value v, SourceSpan span) {
    return std::make_shared<const Expr>(Expr{v, std::move(span)});
}

ExprPtr make_ref(std::vector<std::string> path, SourceSpan span) {
    return std::make_shared<const Expr>(Expr{RefExpr{std::move(path)}, std::move(span)});
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourceSpan span) {
    return std::make_shared<const Expr>(Expr{UnaryExpr{op, std::move(operand)}, std::move(span)});
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
    return std::make_shared<const Expr>(
        Expr{BinaryExpr{op, std::move(lhs), std::move(rhs)}, std::move(span)});
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto* v = std::get_if<Value>(&a.node)) return *v == std::get<Value>(b.node);
    if (auto* r = std::get_if<RefExpr>(&a.node)) return r->path == std::get<RefExpr>(b.node).path;
    if (auto* u = std::get_if<UnaryExpr>(&a.node)) {
        const auto& ub = std::get<UnaryExpr>(b.node);
        return u->op == ub.op && expr_equal(*u->operand, *ub.operand);
    }
    const auto& ba = std::get<BinaryExpr>(a.node);
    const auto& bb = std::get<BinaryExpr>(b.node);
    return ba.op == bb.op && expr_equal(*ba.lhs, *bb.lhs) && expr_equal(*ba.rhs, *bb.rhs);
}

std::string join_path(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& seg : path) {
        if (!out.empty()) out += '.';
        out += seg;
    }
    return out;
}

std::string Node::lane() const {
    if (auto* c = std::get_if<CallAction>(&action)) {
        return c->target.empty() ? std::string{} : c->target.front();
    }
    const auto& s = std::get<SetAction>(action);
    if (s.assignments.empty() || s.assignments.front().target.empty()) return {};
    return s.assignments.front().target.front();
}

std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::Resume: return "resume";
        case Policy::Restart: return "restart";
        case Policy::Continue: return "continue";
    }
    return "?";
}

const Node* Behavior::find_node(std::string_view id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

std::string_view to_string(BlockKind k) {
    switch (k) {
        case BlockKind::Component: return "component";
        case BlockKind::Composite: return "composite";
        case BlockKind::System: return "system";
    }
    return "?";
}

std::string_view to_string(IoDirection d) {
    switch (d) {
        case IoDirection::None: return "internal";
        case IoDirection::Input: return "input";
        case IoDirection::Output: return "output";
    }
    return "?";
}

namespace {
template <typename Vec>
auto find_named(Vec& v, std::string_view n) -> decltype(&v.front()) {
    auto it = std::find_if(v.begin(), v.end(), [&](const auto& e) { return e.name == n; });
    return it == v.end() ? nullptr : &*it;
}
}  // namespace

const FunctionDef* BlockDef::find_function(std::string_view n) const {
    return find_named(functions, n);
}
const AttributeDef* BlockDef::find_attribute(std::string_view n) const {
    return find_named(attributes, n);
}
const PartDef* BlockDef::find_part(std::string_view n) const { return find_named(parts, n); }

const BlockDef* Model::find_block(std::string_view name) const { return find_named(blocks, name); }
BlockDef* Model::find_block(std::string_view name) { return find_named(blocks, name); }
const FunctionDef* Model::find_system_function(std::string_view name) const {
    return find_named(systemFunctions, name);
}

std::string_view to_string(LockStatus s) {
    switch (s) {
        case LockStatus::Inherited: return "inherited";
        case LockStatus::Overridden: return "overridden";
        case LockStatus::New: return "new";
    }
    return "?";
}

std::string_view to_string(ModelErrorCode c) {
    switch (c) {
        case ModelErrorCode::DuplicateBlock: return "DuplicateBlock";
        case ModelErrorCode::UnresolvedReference: return "UnresolvedReference";
        case ModelErrorCode::BaseIsVariant: return "BaseIsVariant";
        case ModelErrorCode::UnknownBlock: return "UnknownBlock";
        case ModelErrorCode::UnknownFunction: return "UnknownFunction";
        case ModelErrorCode::DuplicatePart: return "DuplicatePart";
        case ModelErrorCode::CyclicContainment: return "CyclicContainment";
        case ModelErrorCode::NotAVariant: return "NotAVariant";
        case ModelErrorCode::NotAVariantOf: return "NotAVariantOf";
        case ModelErrorCode::DepthViolation: return "DepthViolation";
        case ModelErrorCode::MemberConflict: return "MemberConflict";
    }
    return "?";
}

}  // namespace modat
