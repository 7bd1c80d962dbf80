#include "modat/validator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "modat/model_ops.hpp"
#include "modat/system_library.hpp"

namespace modat {

namespace {

constexpr RuleId kRules[] = {
    {"E001", "inheritance depth: a variant's base must not itself be a variant"},
    {"E002", "component leaf: component blocks declare no parts and no functions"},
    {"E003", "lane binding: lanes are drawn from self, the host's parts and system"},
    {"E004", "access scope: targets are self, a direct part, or a system function"},
    {"E005", "deep access: paths may not reach through more than one part level"},
    {"E006", "condition operands: literal, parameter, or attribute of a lane"},
    {"E007", "behavior shape: one start, known nodes, policies only where meaningful"},
    {"E008", "type checking: assignments, comparisons and calls are well-typed"},
    {"W001", "unreachable node"},
    {"W002", "node without outgoing transition"},
};

using Emit = std::function<void(std::string_view code, const SourceSpan&, std::string)>;

// ---------------------------------------------------------------------------
// Structural rules

void rule_depth(const Model& m, const Emit& emit) {
    for (const auto& b : m.blocks) {
        if (!b.base) continue;
        const BlockDef* base = m.find_block(*b.base);
        if (base && base->base) {
            emit("E001", b.span,
                 "'" + b.name + "' is a variant of '" + base->name + "', which is itself a variant of '" +
                     *base->base + "'; inheritance depth is limited to one");
        }
    }
}

void rule_component_leaf(const Model& m, const Emit& emit) {
    for (const auto& b : m.blocks) {
        if (b.kind != BlockKind::Component) continue;
        for (const auto& p : b.parts) {
            emit("E002", p.span, "component '" + b.name + "' cannot integrate part '" + p.name + "'");
        }
        for (const auto& f : b.functions) {
            emit("E002", f.span,
                 "component '" + b.name + "' cannot declare function '" + f.name +
                     "'; components only offer setSignal/getSignal");
        }
    }
}

// ---------------------------------------------------------------------------
// Behavior analysis shared by E003..E008

class BehaviorAnalysis {
public:
    BehaviorAnalysis(const Model& m, const BlockDef& host, const FunctionDef& fn, const Emit& emit)
        : m_(m), host_(host), fn_(fn), beh_(*fn.body), emit_(emit) {
        for (const auto& p : effective_parts(m, host.name)) parts_[p.name] = p.block;
        hostAttrs_ = effective_attributes(m, host.name);
    }

    void run() {
        check_lanes();
        check_shape();
        for (const auto& n : beh_.nodes) {
            if (auto* c = std::get_if<CallAction>(&n.action)) {
                check_call(*c, n.span);
            } else {
                for (const auto& a : std::get<SetAction>(n.action).assignments) check_assignment(a);
            }
            for (const auto& a : n.entry) check_assignment(a);
            for (const auto& a : n.exit) check_assignment(a);
        }
        for (const auto& t : beh_.transitions) {
            if (t.condition) check_condition(*t.condition);
            for (const auto& a : t.operation) check_assignment(a);
        }
    }

private:
    enum class Lane { Self, Part, System, Unknown };

    Lane lane_kind(const std::string& name) const {
        if (name == kSelfLane) return Lane::Self;
        if (name == kSystemLane) return Lane::System;
        if (parts_.count(name)) return Lane::Part;
        return Lane::Unknown;
    }

    bool listed(const std::string& lane) const {
        return std::find(beh_.lanes.begin(), beh_.lanes.end(), lane) != beh_.lanes.end();
    }

    std::string where() const { return "'" + host_.name + "." + fn_.name + "'"; }

    std::optional<TypeTag> attr_type(const std::vector<AttributeDef>& attrs, const std::string& name) {
        for (const auto& a : attrs) {
            if (a.name == name) return a.type;
        }
        return std::nullopt;
    }

    void check_lanes() {
        std::set<std::string> seen;
        for (const auto& l : beh_.lanes) {
            if (lane_kind(l) == Lane::Unknown) {
                emit_("E003", beh_.span,
                      "lane '" + l + "' of " + where() + " is neither self, system, nor a part of '" +
                          host_.name + "'");
            } else if (!seen.insert(l).second) {
                emit_("E003", beh_.span, "lane '" + l + "' is listed twice in " + where());
            }
        }
    }

    void check_shape() {
        std::set<std::string> ids;
        for (const auto& n : beh_.nodes) {
            if (!ids.insert(n.id).second) {
                emit_("E007", n.span, "node '" + n.id + "' is declared twice in " + where());
            }
        }
        int starts = 0;
        for (const auto& t : beh_.transitions) {
            if (!t.source) {
                ++starts;
                if (starts > 1) emit_("E007", t.span, where() + " has more than one start transition");
                if (t.kind != TransitionKind::Start) {
                    emit_("E007", t.span,
                          "the start transition takes no trigger ('on completion'/'when' apply to nodes)");
                }
            }
            if (t.source && !ids.count(*t.source)) {
                emit_("E007", t.span, "unknown source node '" + *t.source + "'");
            }
            if (t.target && !ids.count(*t.target)) {
                emit_("E007", t.span, "unknown target node '" + *t.target + "'");
            }
            if (t.policy && t.source) {
                const Node* src = beh_.find_node(*t.source);
                if (src && !src->is_call()) {
                    emit_("E007", t.span,
                          "policy only applies to transitions leaving a function call node");
                }
            }
        }
        if (starts == 0) emit_("E007", beh_.span, where() + " has no start transition");
    }

    // --- references outside conditions ------------------------------------

    std::optional<TypeTag> resolve_ref(const std::vector<std::string>& path, const SourceSpan& span) {
        if (path.size() == 1) {
            for (const auto& p : fn_.params) {
                if (p.name == path[0]) return p.type;
            }
            emit_("E004", span, "unknown name '" + path[0] + "' in " + where());
            return std::nullopt;
        }
        const std::string& head = path[0];
        Lane lane = lane_kind(head);
        if (lane == Lane::Unknown || lane == Lane::System) {
            emit_("E004", span, "'" + join_path(path) + "' is not accessible from " + where() +
                                    " (only self and direct parts)");
            return std::nullopt;
        }
        if (path.size() > 2) {
            emit_("E005", span, "'" + join_path(path) + "' reaches more than one hierarchy level down");
            return std::nullopt;
        }
        if (!listed(head)) {
            emit_("E003", span, "lane '" + head + "' is used but not listed in " + where());
            return std::nullopt;
        }
        return member_type(head, path[1], span);
    }

    std::optional<TypeTag> member_type(const std::string& lane, const std::string& attr,
                                       const SourceSpan& span) {
        std::optional<TypeTag> t;
        if (lane == kSelfLane) {
            t = attr_type(hostAttrs_, attr);
        } else {
            t = attr_type(effective_attributes(m_, parts_.at(lane)), attr);
        }
        if (!t) emit_("E008", span, "'" + lane + "' has no attribute '" + attr + "'");
        return t;
    }

    std::optional<TypeTag> type_expr(const Expr& e) {
        if (auto* v = std::get_if<Value>(&e.node)) return v->type();
        if (auto* r = std::get_if<RefExpr>(&e.node)) return resolve_ref(r->path, e.span);
        if (auto* u = std::get_if<UnaryExpr>(&e.node)) {
            auto t = type_expr(*u->operand);
            if (!t) return t;
            if (u->op == UnaryOp::Not && *t != TypeTag::Bool) {
                emit_("E008", e.span, "'not' needs a BOOL operand");
                return std::nullopt;
            }
            if (u->op == UnaryOp::Neg && *t == TypeTag::Bool) {
                emit_("E008", e.span, "'-' needs a numeric operand");
                return std::nullopt;
            }
            return t;
        }
        const auto& b = std::get<BinaryExpr>(e.node);
        auto l = type_expr(*b.lhs);
        auto r = type_expr(*b.rhs);
        return combine(b.op, l, r, e.span);
    }

    std::optional<TypeTag> combine(BinaryOp op, std::optional<TypeTag> l, std::optional<TypeTag> r,
                                   const SourceSpan& span) {
        if (!l || !r) return std::nullopt;
        if (*l != *r) {
            emit_("E008", span, "operands of '" + std::string(to_string(op)) + "' differ in type (" +
                                    std::string(to_string(*l)) + " vs " + std::string(to_string(*r)) +
                                    ")");
            return std::nullopt;
        }
        switch (op) {
            case BinaryOp::And:
            case BinaryOp::Or:
                if (*l != TypeTag::Bool) {
                    emit_("E008", span, "'" + std::string(to_string(op)) + "' needs BOOL operands");
                    return std::nullopt;
                }
                return TypeTag::Bool;
            case BinaryOp::Eq:
            case BinaryOp::Ne: return TypeTag::Bool;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                if (*l == TypeTag::Bool) {
                    emit_("E008", span, "BOOL values are not ordered");
                    return std::nullopt;
                }
                return TypeTag::Bool;
            case BinaryOp::Add:
            case BinaryOp::Sub:
                if (*l == TypeTag::Bool) {
                    emit_("E008", span, "arithmetic on BOOL");
                    return std::nullopt;
                }
                return l;
            case BinaryOp::Mul:
                if (*l == TypeTag::Bool || *l == TypeTag::Time) {
                    emit_("E008", span, "'*' needs INT or REAL operands");
                    return std::nullopt;
                }
                return l;
        }
        return std::nullopt;
    }

    void check_assignment(const Assignment& a) {
        const auto& path = a.target;
        std::optional<TypeTag> target;
        Lane lane = lane_kind(path[0]);
        if (path.size() == 1) {
            emit_("E004", a.span, "'" + path[0] + "' is not an assignable attribute (write self.<attr>)");
        } else if (lane == Lane::Unknown || lane == Lane::System) {
            emit_("E004", a.span, "'" + join_path(path) + "' is not accessible from " + where());
        } else if (path.size() > 2) {
            emit_("E005", a.span, "'" + join_path(path) + "' reaches more than one hierarchy level down");
        } else if (lane == Lane::Part) {
            emit_("E004", a.span,
                  "attributes of part '" + path[0] + "' are not writable from " + where() +
                      "; call its setSignal instead");
        } else if (!listed(path[0])) {
            emit_("E003", a.span, "lane 'self' is used but not listed in " + where());
        } else {
            target = member_type(path[0], path[1], a.span);
        }
        auto value = type_expr(*a.value);
        if (target && value && *target != *value) {
            emit_("E008", a.span, "cannot assign " + std::string(to_string(*value)) + " to " +
                                      join_path(path) + " of type " + std::string(to_string(*target)));
        }
    }

    void check_call(const CallAction& c, const SourceSpan& span) {
        std::vector<std::optional<TypeTag>> argTypes;
        for (const auto& a : c.args) argTypes.push_back(type_expr(*a));

        const std::string& head = c.target[0];
        Lane lane = lane_kind(head);
        std::string callee = join_path(c.target) + "." + c.function;
        if (lane == Lane::Unknown) {
            emit_("E004", span, "'" + callee + "' is not accessible from " + where() +
                                    " (only self, direct parts and system)");
            return;
        }
        if (c.target.size() > 1) {
            emit_("E005", span, "'" + callee + "' reaches more than one hierarchy level down");
            return;
        }
        if (!listed(head)) {
            emit_("E003", span, "lane '" + head + "' is used but not listed in " + where());
            return;
        }
        std::optional<FunctionDef> fn;
        if (lane == Lane::System) {
            if (auto* f = m_.find_system_function(c.function)) fn = *f;
        } else {
            const std::string& block = lane == Lane::Self ? host_.name : parts_.at(head);
            fn = find_effective_function(m_, block, c.function);
        }
        if (!fn) {
            emit_("E008", span, "'" + head + "' offers no function '" + c.function + "'");
            return;
        }
        if (lane != Lane::System && m_.find_block(lane == Lane::Self ? host_.name : parts_.at(head))->kind ==
                                        BlockKind::Composite &&
            !fn->body) {
            // Missing bodies are reported by E007 on the callee.
            return;
        }
        if (fn->params.size() != c.args.size()) {
            emit_("E008", span, "'" + callee + "' expects " + std::to_string(fn->params.size()) +
                                    " argument(s), got " + std::to_string(c.args.size()));
            return;
        }
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            if (argTypes[i] && *argTypes[i] != fn->params[i].type) {
                emit_("E008", c.args[i]->span,
                      "argument '" + fn->params[i].name + "' of '" + callee + "' expects " +
                          std::string(to_string(fn->params[i].type)) + ", got " +
                          std::string(to_string(*argTypes[i])));
            }
        }
    }

    // --- conditions ---------------------------------------------------------

    std::optional<TypeTag> condition_operand(const Expr& e) {
        if (auto* v = std::get_if<Value>(&e.node)) return v->type();
        if (auto* r = std::get_if<RefExpr>(&e.node)) {
            const auto& path = r->path;
            if (path.size() == 1) {
                for (const auto& p : fn_.params) {
                    if (p.name == path[0]) return p.type;
                }
                emit_("E006", e.span, "'" + path[0] + "' is not a parameter of " + where());
                return std::nullopt;
            }
            Lane lane = lane_kind(path[0]);
            bool sameLevel = path.size() == 2 && (lane == Lane::Self || lane == Lane::Part) && listed(path[0]);
            if (!sameLevel) {
                emit_("E006", e.span,
                      "condition operand '" + join_path(path) + "' is not an attribute of a lane of " +
                          where());
                return std::nullopt;
            }
            return member_type(path[0], path[1], e.span);
        }
        emit_("E006", e.span,
              "condition operands must be a literal, a parameter or a lane attribute, not '" +
                  std::string(e.node.index() == 2 ? "unary" : "compound") + "' expression");
        return std::nullopt;
    }

    std::optional<TypeTag> check_condition_node(const Expr& e) {
        if (auto* u = std::get_if<UnaryExpr>(&e.node); u && u->op == UnaryOp::Not) {
            auto t = check_condition_node(*u->operand);
            if (t && *t != TypeTag::Bool) {
                emit_("E008", e.span, "'not' needs a BOOL operand");
                return std::nullopt;
            }
            return t;
        }
        if (auto* b = std::get_if<BinaryExpr>(&e.node)) {
            if (b->op == BinaryOp::And || b->op == BinaryOp::Or) {
                auto l = check_condition_node(*b->lhs);
                auto r = check_condition_node(*b->rhs);
                return combine(b->op, l, r, e.span);
            }
            if (is_comparison(b->op)) {
                auto l = condition_operand(*b->lhs);
                auto r = condition_operand(*b->rhs);
                return combine(b->op, l, r, e.span);
            }
        }
        return condition_operand(e);
    }

    void check_condition(const Expr& e) {
        auto t = check_condition_node(e);
        if (t && *t != TypeTag::Bool) {
            emit_("E008", e.span, "condition must be BOOL, is " + std::string(to_string(*t)));
        }
    }

    const Model& m_;
    const BlockDef& host_;
    const FunctionDef& fn_;
    const Behavior& beh_;
    const Emit& emit_;
    std::map<std::string, std::string> parts_;
    std::vector<AttributeDef> hostAttrs_;
};

void for_each_behavior(const Model& m, const std::function<void(const BlockDef&, const FunctionDef&)>& f) {
    for (const auto& b : m.blocks) {
        if (b.kind != BlockKind::Composite) continue;
        for (const auto& fn : b.functions) f(b, fn);
    }
}

void rule_behaviors(const Model& m, const Emit& emit) {
    for_each_behavior(m, [&](const BlockDef& b, const FunctionDef& fn) {
        if (!fn.body) {
            emit("E007", fn.span, "function '" + b.name + "." + fn.name + "' has no behavior model");
            return;
        }
        BehaviorAnalysis(m, b, fn, emit).run();
    });
}

void rule_system_functions(const Model& m, const Emit& emit) {
    for (const auto& f : m.systemFunctions) {
        const BuiltinSpec* spec = find_builtin(f.name);
        if (!spec) {
            emit("E008", f.span, "no system library implementation for '" + f.name + "'");
        } else if (spec->params != f.params) {
            emit("E008", f.span, "signature of system function '" + f.name +
                                     "' does not match the library");
        }
    }
}

// Generated PLC code cannot recurse, so calls on `self` must not cycle.
void rule_self_call_cycles(const Model& m, const Emit& emit) {
    for (const auto& b : m.blocks) {
        if (b.kind != BlockKind::Composite) continue;
        std::map<std::string, std::set<std::string>> calls;
        for (const auto& e : effective_interface(m, b.name)) {
            auto& out = calls[e.function.name];
            if (!e.function.body) continue;
            for (const auto& n : e.function.body->nodes) {
                if (auto* c = std::get_if<CallAction>(&n.action); c && c->target.size() == 1 && c->target[0] == kSelfLane) {
                    out.insert(c->function);
                }
            }
        }
        for (const auto& f : b.functions) {
            std::set<std::string> seen;
            std::vector<std::string> work(calls[f.name].begin(), calls[f.name].end());
            bool cyclic = false;
            while (!work.empty() && !cyclic) {
                std::string g = work.back();
                work.pop_back();
                if (g == f.name) cyclic = true;
                if (!seen.insert(g).second) continue;
                auto it = calls.find(g);
                if (it != calls.end()) work.insert(work.end(), it->second.begin(), it->second.end());
            }
            if (cyclic) {
                emit("E007", f.span, "function '" + b.name + "." + f.name + "' calls itself through self calls");
            }
        }
    }
}

void rule_reachability(const Model& m, const Emit& emit) {
    for_each_behavior(m, [&](const BlockDef& b, const FunctionDef& fn) {
        if (!fn.body) return;
        const Behavior& beh = *fn.body;
        std::set<std::string> reached;
        std::vector<std::string> work;
        for (const auto& t : beh.transitions) {
            if (!t.source && t.target && reached.insert(*t.target).second) work.push_back(*t.target);
        }
        while (!work.empty()) {
            std::string cur = work.back();
            work.pop_back();
            for (const auto& t : beh.transitions) {
                if (t.source == cur && t.target && reached.insert(*t.target).second) {
                    work.push_back(*t.target);
                }
            }
        }
        for (const auto& n : beh.nodes) {
            if (!reached.count(n.id)) {
                emit("W001", n.span, "node '" + n.id + "' of '" + b.name + "." + fn.name +
                                         "' is unreachable");
            }
            bool out = std::any_of(beh.transitions.begin(), beh.transitions.end(),
                                   [&](const Transition& t) { return t.source == n.id; });
            if (!out) {
                emit("W002", n.span, "node '" + n.id + "' of '" + b.name + "." + fn.name +
                                         "' has no outgoing transition");
            }
        }
    });
}

Diagnostics run_rules(const Model& m, const ValidateOptions& options,
                      const std::function<bool(std::string_view)>& wanted) {
    Diagnostics out;
    Emit emit = [&](std::string_view code, const SourceSpan& span, std::string msg) {
        if (!wanted(code)) return;
        Severity sev = code.front() == 'W' ? Severity::Warning : Severity::Error;
        if (code == "E001" && options.allowDeepInheritance) sev = Severity::Warning;
        out.push_back(Diagnostic{sev, std::string(code), std::move(msg), span});
    };
    rule_depth(m, emit);
    rule_component_leaf(m, emit);
    rule_system_functions(m, emit);
    rule_behaviors(m, emit);
    rule_self_call_cycles(m, emit);
    rule_reachability(m, emit);
    sort_diagnostics(out);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::span<const RuleId> all_rules() { return kRules; }

Diagnostics validate(const Model& model, const ValidateOptions& options) {
    return run_rules(model, options, [](std::string_view) { return true; });
}

Diagnostics check_rule(const Model& model, std::string_view code, const ValidateOptions& options) {
    bool known = std::any_of(std::begin(kRules), std::end(kRules),
                             [&](const RuleId& r) { return r.code == code; });
    if (!known) throw UnknownRule("unknown rule '" + std::string(code) + "'");
    return run_rules(model, options, [&](std::string_view c) { return c == code; });
}

}  // namespace modat
