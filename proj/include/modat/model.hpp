#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "modat/source.hpp"
#include "modat/value.hpp"

namespace modat {

// ---------------------------------------------------------------------------
// Expressions

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul };

bool is_comparison(BinaryOp op);
std::string_view to_string(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Dotted reference. One segment names a function parameter, two segments
/// name `lane.attribute`; anything longer is rejected by the validator.
struct RefExpr {
    std::vector<std::string> path;
};

struct UnaryExpr {
    UnaryOp op;
    ExprPtr operand;
};

struct BinaryExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Expr {
    std::variant<Value, RefExpr, UnaryExpr, BinaryExpr> node;
    SourceSpan span;
};

ExprPtr make_literal(Value v, SourceSpan span = {});
ExprPtr make_ref(std::vector<std::string> path, SourceSpan span = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourceSpan span = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});

/// Structural equality, spans ignored.
bool expr_equal(const Expr& a, const Expr& b);

std::string join_path(const std::vector<std::string>& path);

// ---------------------------------------------------------------------------
// Behavior implementation layer

struct Assignment {
    std::vector<std::string> target;
    ExprPtr value;
    SourceSpan span;
};

/// Call of a function on a lane: `lane.fn(args)`. The path holds every
/// segment before the function name.
struct CallAction {
    std::vector<std::string> target;
    std::string function;
    std::vector<ExprPtr> args;
};

struct SetAction {
    std::vector<Assignment> assignments;
};

struct Node {
    std::string id;
    std::variant<CallAction, SetAction> action;
    std::vector<Assignment> entry;
    std::vector<Assignment> exit;
    SourceSpan span;

    bool is_call() const { return std::holds_alternative<CallAction>(action); }
    /// First path segment of the action target (the node's lane).
    std::string lane() const;
};

enum class TransitionKind { Start, Completion, Condition };
enum class Policy { Resume, Restart, Continue };

std::string_view to_string(Policy p);

struct Transition {
    std::optional<std::string> source;  // nullopt: start point
    std::optional<std::string> target;  // nullopt: end point
    TransitionKind kind = TransitionKind::Completion;
    ExprPtr condition;                  // Condition only
    std::optional<Policy> policy;       // Condition only, when written
    std::vector<Assignment> operation;
    SourceSpan span;
};

struct Behavior {
    std::vector<std::string> lanes;
    std::vector<Node> nodes;
    std::vector<Transition> transitions;
    SourceSpan span;

    const Node* find_node(std::string_view id) const;
};

// ---------------------------------------------------------------------------
// Structure implementation layer

enum class BlockKind { Component, Composite, System };
enum class IoDirection { None, Input, Output };

std::string_view to_string(BlockKind k);
std::string_view to_string(IoDirection d);

struct Param {
    std::string name;
    TypeTag type = TypeTag::Bool;

    friend bool operator==(const Param&, const Param&) = default;
};

struct FunctionDef {
    std::string name;
    std::vector<Param> params;
    std::optional<Behavior> body;
    bool isOverride = false;
    SourceSpan span;
};

struct AttributeDef {
    std::string name;
    TypeTag type = TypeTag::Bool;
    Value initial;
    IoDirection io = IoDirection::None;
    SourceSpan span;
};

struct PartDef {
    std::string name;
    std::string block;
    SourceSpan span;
};

inline constexpr std::string_view kSignal = "Signal";
inline constexpr std::string_view kSelfLane = "self";
inline constexpr std::string_view kSystemLane = "system";

struct BlockDef {
    std::string name;
    BlockKind kind = BlockKind::Composite;
    std::optional<std::string> base;
    std::vector<PartDef> parts;
    std::vector<AttributeDef> attributes;
    std::vector<FunctionDef> functions;
    SourceSpan span;

    const FunctionDef* find_function(std::string_view n) const;
    const AttributeDef* find_attribute(std::string_view n) const;
    const PartDef* find_part(std::string_view n) const;
};

struct RootDecl {
    std::string instance;
    std::string block;
    SourceSpan span;
};

struct Model {
    std::vector<BlockDef> blocks;  // declaration order
    std::vector<FunctionDef> systemFunctions;
    RootDecl root;

    const BlockDef* find_block(std::string_view name) const;
    BlockDef* find_block(std::string_view name);
    const FunctionDef* find_system_function(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Execution structure

enum class LockStatus { Inherited, Overridden, New };

std::string_view to_string(LockStatus s);

struct ObjectInstance {
    std::string path;
    std::string block;
    std::vector<ObjectInstance> children;
    std::vector<std::pair<std::string, Value>> variables;
};

// ---------------------------------------------------------------------------
// Errors raised by the in-memory model API.

enum class ModelErrorCode {
    DuplicateBlock,
    UnresolvedReference,
    BaseIsVariant,
    UnknownBlock,
    UnknownFunction,
    DuplicatePart,
    CyclicContainment,
    NotAVariant,
    NotAVariantOf,
    DepthViolation,
    MemberConflict,
};

std::string_view to_string(ModelErrorCode c);

class ModelError : public std::runtime_error {
public:
    ModelError(ModelErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ModelErrorCode code() const { return code_; }

private:
    ModelErrorCode code_;
};

}  // namespace modat
