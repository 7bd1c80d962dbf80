#include "modat/formatter.hpp"

#include <cmath>
#include <sstream>

namespace modat {

namespace {

// Binding strength, loosest first. Mirrors the parser's precedence climb.
int precedence(const Expr& e) {
    if (auto* u = std::get_if<UnaryExpr>(&e.node)) return u->op == UnaryOp::Not ? 3 : 7;
    if (auto* b = std::get_if<BinaryExpr>(&e.node)) {
        switch (b->op) {
            case BinaryOp::Or: return 1;
            case BinaryOp::And: return 2;
            case BinaryOp::Add:
            case BinaryOp::Sub: return 5;
            case BinaryOp::Mul: return 6;
            default: return 4;
        }
    }
    if (auto* v = std::get_if<Value>(&e.node)) {
        // A negative number literal prints with a leading '-', which only
        // reparses as a literal in unary position.
        bool negative = (v->type() == TypeTag::Int && v->as_int() < 0) ||
                        (v->type() == TypeTag::Real && std::signbit(v->as_real()));
        return negative ? 7 : 8;
    }
    return 8;
}

void print(std::ostream& os, const Expr& e);

void print_child(std::ostream& os, const Expr& child, int minPrec) {
    if (precedence(child) < minPrec) {
        os << '(';
        print(os, child);
        os << ')';
    } else {
        print(os, child);
    }
}

void print(std::ostream& os, const Expr& e) {
    if (auto* v = std::get_if<Value>(&e.node)) {
        os << format_literal(*v);
    } else if (auto* r = std::get_if<RefExpr>(&e.node)) {
        os << join_path(r->path);
    } else if (auto* u = std::get_if<UnaryExpr>(&e.node)) {
        if (u->op == UnaryOp::Not) {
            os << "not ";
            print_child(os, *u->operand, 3);
        } else {
            os << '-';
            // "-5" would reparse as a literal, so a negated literal keeps its parens.
            if (std::holds_alternative<Value>(u->operand->node)) {
                os << '(';
                print(os, *u->operand);
                os << ')';
            } else {
                print_child(os, *u->operand, 8);
            }
        }
    } else {
        const auto& b = std::get<BinaryExpr>(e.node);
        int p = precedence(e);
        print_child(os, *b.lhs, p);
        os << ' ' << to_string(b.op) << ' ';
        print_child(os, *b.rhs, p + 1);
    }
}

void print_assignments(std::ostream& os, const std::vector<Assignment>& as) {
    for (std::size_t i = 0; i < as.size(); ++i) {
        if (i) os << ", ";
        os << format_assignment(as[i]);
    }
}

std::string pad(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

void print_params(std::ostream& os, const std::vector<Param>& params) {
    os << '(';
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) os << ", ";
        os << params[i].name << ": " << to_string(params[i].type);
    }
    os << ')';
}

void print_behavior(std::ostream& os, const Behavior& b, int indent) {
    os << " {\n" << pad(indent + 4) << "lanes ";
    for (std::size_t i = 0; i < b.lanes.size(); ++i) {
        if (i) os << ", ";
        os << b.lanes[i];
    }
    os << '\n';
    for (const auto& n : b.nodes) {
        os << pad(indent + 4) << "node " << n.id << ": ";
        if (auto* c = std::get_if<CallAction>(&n.action)) {
            os << "call " << join_path(c->target) << '.' << c->function << '(';
            for (std::size_t i = 0; i < c->args.size(); ++i) {
                if (i) os << ", ";
                print(os, *c->args[i]);
            }
            os << ')';
        } else {
            os << "set ";
            print_assignments(os, std::get<SetAction>(n.action).assignments);
        }
        if (!n.entry.empty()) {
            os << '\n' << pad(indent + 8) << "entry ";
            print_assignments(os, n.entry);
        }
        if (!n.exit.empty()) {
            os << '\n' << pad(indent + 8) << "exit ";
            print_assignments(os, n.exit);
        }
        os << '\n';
    }
    for (const auto& t : b.transitions) {
        os << pad(indent + 4) << (t.source ? *t.source : "start") << " -> "
           << (t.target ? *t.target : "end");
        switch (t.kind) {
            case TransitionKind::Start: break;
            case TransitionKind::Completion: os << " on completion"; break;
            case TransitionKind::Condition:
                os << " when ";
                print(os, *t.condition);
                if (t.policy) os << " policy " << to_string(*t.policy);
                break;
        }
        if (!t.operation.empty()) {
            os << " then ";
            print_assignments(os, t.operation);
        }
        os << '\n';
    }
    os << pad(indent) << '}';
}

void print_block(std::ostream& os, const BlockDef& b) {
    bool component = b.kind == BlockKind::Component;
    std::size_t firstAttr = 0;
    if (b.base) {
        os << "variant " << b.name << " of " << *b.base << " {\n";
    } else if (component) {
        os << "block " << b.name << " kind component";
        if (!b.attributes.empty() && b.attributes.front().name == kSignal) {
            const auto& s = b.attributes.front();
            os << ' ' << to_string(s.io) << ' ' << to_string(s.type) << " = " << format_literal(s.initial);
            firstAttr = 1;
        }
        os << " {\n";
    } else {
        os << "block " << b.name << " kind composite {\n";
    }
    for (const auto& p : b.parts) os << "    part " << p.name << ": " << p.block << '\n';
    for (std::size_t i = firstAttr; i < b.attributes.size(); ++i) {
        const auto& a = b.attributes[i];
        os << "    attr " << a.name << ": " << to_string(a.type) << " = " << format_literal(a.initial)
           << '\n';
    }
    for (const auto& f : b.functions) {
        os << "    " << (f.isOverride ? "override " : "") << format_function(f, 4) << '\n';
    }
    os << "}\n";
}

}  // namespace

std::string format_expr(const Expr& expr) {
    std::ostringstream os;
    print(os, expr);
    return os.str();
}

std::string format_assignment(const Assignment& a) {
    return join_path(a.target) + " := " + format_expr(*a.value);
}

std::string format_function(const FunctionDef& fn, int indent) {
    std::ostringstream os;
    os << "function " << fn.name;
    print_params(os, fn.params);
    if (fn.body) print_behavior(os, *fn.body, indent);
    return os.str();
}

std::string format_model(const Model& model) {
    std::ostringstream os;
    os << "// " << kGrammarVersion << "\n";
    for (const auto& f : model.systemFunctions) {
        os << "\nsystem function " << f.name;
        print_params(os, f.params);
        os << '\n';
    }
    for (const auto& b : model.blocks) {
        os << '\n';
        print_block(os, b);
    }
    os << "\nroot " << model.root.instance << ": " << model.root.block << '\n';
    return os.str();
}

std::string format_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "invoke " << sc.invocation.instancePath << '.' << sc.invocation.function << '(';
    for (std::size_t i = 0; i < sc.invocation.args.size(); ++i) {
        if (i) os << ", ";
        os << format_literal(sc.invocation.args[i]);
    }
    os << ")\n";
    for (const auto& in : sc.inputs) {
        os << "at " << in.cycle << " set " << in.instancePath << ".Signal = " << format_literal(in.value)
           << '\n';
    }
    for (const auto& a : sc.assertions) {
        os << "at " << a.cycle << (a.expected ? " expect " : " forbid ") << format_expr(*a.expr) << '\n';
    }
    os << "maxcycles " << sc.maxCycles << '\n';
    return os.str();
}

}  // namespace modat
