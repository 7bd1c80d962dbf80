#include "modat/simulator.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

#include "modat/formatter.hpp"
#include "modat/model_ops.hpp"
#include "modat/system_library.hpp"

namespace modat {

std::string_view to_string(InstanceStatus s) {
    switch (s) {
        case InstanceStatus::Fresh: return "fresh";
        case InstanceStatus::Running: return "running";
        case InstanceStatus::Paused: return "paused";
        case InstanceStatus::Detached: return "detached";
        case InstanceStatus::Completed: return "completed";
    }
    return "?";
}

std::string_view to_string(TransitionKind k) {
    switch (k) {
        case TransitionKind::Start: return "start";
        case TransitionKind::Completion: return "completion";
        case TransitionKind::Condition: return "condition";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Static run structure, shared between copies of a ScanState.

struct ObjectInfo {
    std::string path;
    std::string block;
    bool component = false;
    bool inputComponent = false;
    std::map<std::string, std::string, std::less<>> parts;  // part name -> object path
    std::map<std::string, FunctionDef, std::less<>> functions;
    std::map<std::string, int, std::less<>> functionOrder;
    int preorder = 0;
};

struct Topology {
    Model model;
    std::map<std::string, ObjectInfo, std::less<>> objects;
    std::vector<std::string> varNames;
    std::unordered_map<std::string, int> varIndex;

    const ObjectInfo& object(std::string_view path) const {
        auto it = objects.find(path);
        if (it == objects.end()) {
            throw SimulationError(SimErrorCode::UnknownTarget, "no object '" + std::string(path) + "'");
        }
        return it->second;
    }

    int var(const std::string& name) const {
        auto it = varIndex.find(name);
        if (it == varIndex.end()) {
            throw SimulationError(SimErrorCode::RuntimeTypeError, "no variable '" + name + "'");
        }
        return it->second;
    }
};

namespace {

void collect(const Model& m, const ObjectInstance& inst, Topology& topo, ScanState& state) {
    ObjectInfo info;
    info.path = inst.path;
    info.block = inst.block;
    info.preorder = static_cast<int>(topo.objects.size());
    const BlockDef* b = m.find_block(inst.block);
    info.component = b->kind == BlockKind::Component;
    if (const AttributeDef* sig = find_signal(effective_attributes(m, inst.block))) {
        info.inputComponent = info.component && sig->io == IoDirection::Input;
    }
    for (const auto& child : inst.children) {
        info.parts[child.path.substr(inst.path.size() + 1)] = child.path;
    }
    int order = 0;
    for (const auto& e : effective_interface(m, inst.block)) {
        info.functionOrder[e.function.name] = order++;
        info.functions[e.function.name] = e.function;
    }
    for (const auto& [name, value] : inst.variables) {
        std::string q = inst.path + "." + name;
        topo.varIndex[q] = static_cast<int>(topo.varNames.size());
        topo.varNames.push_back(q);
        state.values.push_back(value);
    }
    topo.objects.emplace(inst.path, std::move(info));
    for (const auto& child : inst.children) collect(m, child, topo, state);
}

std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

Value arith(BinaryOp op, const Value& l, const Value& r) {
    switch (l.type()) {
        case TypeTag::Int: {
            std::int64_t a = l.as_int(), b = r.as_int();
            switch (op) {
                case BinaryOp::Add: return Value::integer(wrap(a + b));
                case BinaryOp::Sub: return Value::integer(wrap(a - b));
                default: return Value::integer(wrap(static_cast<std::int64_t>(
                    static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b))));
            }
        }
        case TypeTag::Real:
            switch (op) {
                case BinaryOp::Add: return Value::real(l.as_real() + r.as_real());
                case BinaryOp::Sub: return Value::real(l.as_real() - r.as_real());
                default: return Value::real(l.as_real() * r.as_real());
            }
        case TypeTag::Time:
            if (op == BinaryOp::Add) return Value::time(l.as_time() + r.as_time());
            if (op == BinaryOp::Sub) return Value::time(l.as_time() - r.as_time());
            break;
        case TypeTag::Bool: break;
    }
    throw SimulationError(SimErrorCode::RuntimeTypeError, "invalid arithmetic operands");
}

template <typename T>
bool compare(BinaryOp op, const T& a, const T& b) {
    switch (op) {
        case BinaryOp::Eq: return a == b;
        case BinaryOp::Ne: return a != b;
        case BinaryOp::Lt: return a < b;
        case BinaryOp::Le: return a <= b;
        case BinaryOp::Gt: return a > b;
        case BinaryOp::Ge: return a >= b;
        default: return false;
    }
}

bool compare_values(BinaryOp op, const Value& l, const Value& r) {
    if (l.type() != r.type()) {
        throw SimulationError(SimErrorCode::RuntimeTypeError, "comparison of different types");
    }
    switch (l.type()) {
        case TypeTag::Bool: return compare(op, l.as_bool(), r.as_bool());
        case TypeTag::Int: return compare(op, l.as_int(), r.as_int());
        case TypeTag::Real: return compare(op, l.as_real(), r.as_real());
        case TypeTag::Time: return compare(op, l.as_time(), r.as_time());
    }
    return false;
}

// Read-only expression evaluation over a state.
struct Reader {
    const ScanState& s_;
    const Topology& topo_;

    Value eval(const Expr& e, const EvalScope& scope) const {
        if (auto* v = std::get_if<Value>(&e.node)) return *v;
        if (auto* r = std::get_if<RefExpr>(&e.node)) return lookup(r->path, scope);
        if (auto* u = std::get_if<UnaryExpr>(&e.node)) {
            Value v = eval(*u->operand, scope);
            if (u->op == UnaryOp::Not) return Value::boolean(!v.as_bool());
            switch (v.type()) {
                case TypeTag::Int: return Value::integer(wrap(-static_cast<std::int64_t>(v.as_int())));
                case TypeTag::Real: return Value::real(-v.as_real());
                case TypeTag::Time: return Value::time(-v.as_time());
                case TypeTag::Bool: break;
            }
            throw SimulationError(SimErrorCode::RuntimeTypeError, "negation of BOOL");
        }
        const auto& b = std::get<BinaryExpr>(e.node);
        if (b.op == BinaryOp::And) {
            return Value::boolean(eval(*b.lhs, scope).as_bool() && eval(*b.rhs, scope).as_bool());
        }
        if (b.op == BinaryOp::Or) {
            return Value::boolean(eval(*b.lhs, scope).as_bool() || eval(*b.rhs, scope).as_bool());
        }
        Value l = eval(*b.lhs, scope);
        Value r = eval(*b.rhs, scope);
        if (is_comparison(b.op)) return Value::boolean(compare_values(b.op, l, r));
        return arith(b.op, l, r);
    }

    int var_of(const std::vector<std::string>& path, const EvalScope& scope) const {
        if (!scope.objectPath) return topo_.var(join_path(path));
        const ObjectInfo& obj = topo_.object(*scope.objectPath);
        if (path.size() != 2) {
            throw SimulationError(SimErrorCode::RuntimeTypeError, "unsupported reference '" + join_path(path) + "'");
        }
        if (path[0] == kSelfLane) return topo_.var(obj.path + "." + path[1]);
        auto it = obj.parts.find(path[0]);
        if (it == obj.parts.end()) {
            throw SimulationError(SimErrorCode::RuntimeTypeError, "unknown lane '" + path[0] + "'");
        }
        return topo_.var(it->second + "." + path[1]);
    }

    Value lookup(const std::vector<std::string>& path, const EvalScope& scope) const {
        if (scope.objectPath && path.size() == 1) {
            for (const auto& [name, v] : scope.params) {
                if (name == path[0]) return v;
            }
            throw SimulationError(SimErrorCode::RuntimeTypeError, "unbound parameter '" + path[0] + "'");
        }
        return s_.values[var_of(path, scope)];
    }

};

class Engine {
public:
    explicit Engine(ScanState& s) : s_(s), topo_(*s.topology) {}

    CycleRecord cycle(const std::vector<InputLatch>& inputs) {
        CycleRecord rec;
        rec.cycle = s_.cycle;
        for (const auto& in : inputs) {
            const ObjectInfo& obj = topo_.object(in.componentPath);
            if (!obj.inputComponent) {
                throw SimulationError(SimErrorCode::UnknownTarget,
                                      "'" + in.componentPath + "' is not an input component");
            }
            int idx = topo_.var(in.componentPath + "." + std::string(kSignal));
            if (s_.values[idx].type() != in.value.type()) {
                throw SimulationError(SimErrorCode::TypeMismatch,
                                      "input for '" + in.componentPath + "' has the wrong type");
            }
            s_.values[idx] = in.value;
            rec.inputs.emplace_back(topo_.varNames[idx], in.value);
        }
        fired_ = &rec.fired;

        FunctionInstance& root = s_.instances.at(s_.root);
        if (root.status != InstanceStatus::Completed) step(root);

        // Visit every function instance in tree order; one that is detached
        // at the moment of the visit gets its cycle.
        for (const InstanceKey& key : ordered_keys(false)) {
            FunctionInstance& fi = s_.instances.at(key);
            if (fi.status == InstanceStatus::Detached) step(fi);
        }

        rec.active = active_chain();
        for (const InstanceKey& key : detached_keys()) {
            const FunctionInstance& fi = s_.instances.at(key);
            rec.detached.push_back({key.str(), node_name(fi)});
        }
        for (std::size_t i = 0; i < s_.values.size(); ++i) {
            rec.vars.emplace_back(topo_.varNames[i], s_.values[i]);
        }
        ++s_.cycle;
        return rec;
    }

    Value eval(const Expr& e, const EvalScope& scope) const { return Reader{s_, topo_}.eval(e, scope); }

private:
    int var_of(const std::vector<std::string>& path, const EvalScope& scope) const {
        return Reader{s_, topo_}.var_of(path, scope);
    }

    const FunctionDef& def(const FunctionInstance& fi) const {
        return topo_.object(fi.key.path).functions.at(fi.key.function);
    }

    EvalScope scope_of(const FunctionInstance& fi) const {
        EvalScope sc;
        sc.objectPath = fi.key.path;
        const FunctionDef& fn = def(fi);
        for (std::size_t i = 0; i < fn.params.size(); ++i) sc.params.emplace_back(fn.params[i].name, fi.args[i]);
        return sc;
    }

    std::string node_name(const FunctionInstance& fi) const {
        if (fi.activeNode < 0) return "";
        return def(fi).body->nodes[static_cast<std::size_t>(fi.activeNode)].id;
    }

    void assign(const std::vector<Assignment>& ops, const EvalScope& scope) {
        for (const auto& a : ops) {
            Value v = eval(*a.value, scope);
            s_.values[var_of(a.target, scope)] = v;
        }
    }

    int node_index(const Behavior& b, const std::string& id) const {
        for (std::size_t i = 0; i < b.nodes.size(); ++i) {
            if (b.nodes[i].id == id) return static_cast<int>(i);
        }
        throw SimulationError(SimErrorCode::RuntimeTypeError, "unknown node '" + id + "'");
    }

    // Composite callee of a call node, or nullopt for intrinsic/system calls.
    std::optional<InstanceKey> callee_key(const FunctionInstance& fi, const Node& n) const {
        const auto* call = std::get_if<CallAction>(&n.action);
        if (!call) return std::nullopt;
        const std::string& lane = call->target[0];
        if (lane == kSystemLane) return std::nullopt;
        const ObjectInfo& host = topo_.object(fi.key.path);
        std::string path = lane == kSelfLane ? host.path : host.parts.at(lane);
        const ObjectInfo& target = topo_.object(path);
        if (target.component) return std::nullopt;
        return InstanceKey{path, call->function};
    }

    FunctionInstance& ensure(const InstanceKey& key) {
        auto it = s_.instances.find(key);
        if (it == s_.instances.end()) {
            FunctionInstance fi;
            fi.key = key;
            it = s_.instances.emplace(key, std::move(fi)).first;
        }
        return it->second;
    }

    void reset_timer(FunctionInstance& fi) {
        fi.timerElapsed = Duration{0};
        fi.timerSteps = 0;
        fi.timerDone = false;
    }

    void enter(FunctionInstance& fi, int node, const EvalScope& scope) {
        fi.activeNode = node;
        fi.doCount = 0;
        reset_timer(fi);
        assign(def(fi).body->nodes[static_cast<std::size_t>(node)].entry, scope);
    }

    void start(FunctionInstance& fi) {
        fi.lastStepped = s_.cycle;
        fi.status = InstanceStatus::Running;
        fi.activeNode = -1;
        reset_timer(fi);
        const Behavior& b = *def(fi).body;
        EvalScope scope = scope_of(fi);
        for (const auto& t : b.transitions) {
            if (t.source) continue;
            fired_->push_back({fi.key.str(), "start", t.target ? *t.target : "end", TransitionKind::Start});
            assign(t.operation, scope);
            if (!t.target) {
                fi.status = InstanceStatus::Completed;
                return;
            }
            enter(fi, node_index(b, *t.target), scope);
            do_action(fi, scope);
            return;
        }
    }

    bool action_complete(const FunctionInstance& fi, const Node& n) const {
        if (fi.doCount < 1) return false;
        const auto* call = std::get_if<CallAction>(&n.action);
        if (!call) return true;
        if (call->target[0] == kSystemLane) return fi.timerDone;
        if (auto key = callee_key(fi, n)) {
            auto it = s_.instances.find(*key);
            return it != s_.instances.end() && it->second.status == InstanceStatus::Completed;
        }
        return true;
    }

    void reset_chain(FunctionInstance& fi) {
        if (fi.activeNode >= 0) {
            const Node& n = def(fi).body->nodes[static_cast<std::size_t>(fi.activeNode)];
            if (auto key = callee_key(fi, n)) {
                auto it = s_.instances.find(*key);
                if (it != s_.instances.end() && it->second.status == InstanceStatus::Running) {
                    reset_chain(it->second);
                }
            }
        }
        fi.status = InstanceStatus::Fresh;
        fi.activeNode = -1;
        fi.doCount = 0;
        reset_timer(fi);
    }

    void step(FunctionInstance& fi) {
        if (fi.lastStepped == s_.cycle) return;
        if (fi.status == InstanceStatus::Fresh || fi.status == InstanceStatus::Completed) {
            start(fi);
            return;
        }
        fi.lastStepped = s_.cycle;
        const Behavior& b = *def(fi).body;
        const Node& n = b.nodes[static_cast<std::size_t>(fi.activeNode)];
        EvalScope scope = scope_of(fi);
        for (const auto& t : b.transitions) {
            if (t.source != n.id) continue;
            bool enabled = t.kind == TransitionKind::Completion ? action_complete(fi, n)
                                                                 : eval(*t.condition, scope).as_bool();
            if (!enabled) continue;
            fired_->push_back({fi.key.str(), n.id, t.target ? *t.target : "end", t.kind});
            assign(n.exit, scope);
            if (auto key = callee_key(fi, n); key && fi.doCount >= 1) {
                FunctionInstance& callee = s_.instances.at(*key);
                if (callee.status == InstanceStatus::Running) {
                    switch (t.policy.value_or(Policy::Restart)) {
                        case Policy::Resume: callee.status = InstanceStatus::Paused; break;
                        case Policy::Restart: reset_chain(callee); break;
                        case Policy::Continue: callee.status = InstanceStatus::Detached; break;
                    }
                }
            }
            assign(t.operation, scope);
            if (!t.target) {
                fi.status = InstanceStatus::Completed;
                fi.activeNode = -1;
                reset_timer(fi);
            } else {
                enter(fi, node_index(b, *t.target), scope);
            }
            return;
        }
        do_action(fi, scope);
    }

    void do_action(FunctionInstance& fi, const EvalScope& scope) {
        const Node& n = def(fi).body->nodes[static_cast<std::size_t>(fi.activeNode)];
        ++fi.doCount;
        if (const auto* set = std::get_if<SetAction>(&n.action)) {
            assign(set->assignments, scope);
            return;
        }
        const auto& call = std::get<CallAction>(n.action);
        std::vector<Value> args;
        for (const auto& a : call.args) args.push_back(eval(*a, scope));
        const std::string& lane = call.target[0];
        if (lane == kSystemLane) {
            system_call(fi, call.function, args);
            return;
        }
        const ObjectInfo& host = topo_.object(fi.key.path);
        std::string path = lane == kSelfLane ? host.path : host.parts.at(lane);
        if (topo_.object(path).component) {
            if (call.function == "setSignal") {
                s_.values[topo_.var(path + "." + std::string(kSignal))] = args.at(0);
            }
            return;
        }
        FunctionInstance& callee = ensure({path, call.function});
        switch (callee.status) {
            case InstanceStatus::Fresh:
            case InstanceStatus::Completed:
                callee.args = std::move(args);
                start(callee);
                break;
            case InstanceStatus::Paused:
            case InstanceStatus::Detached:
                callee.status = InstanceStatus::Running;
                step(callee);
                break;
            case InstanceStatus::Running: step(callee); break;
        }
    }

    void system_call(FunctionInstance& fi, const std::string& name, const std::vector<Value>& args) {
        const BuiltinSpec* spec = find_builtin(name);
        if (!spec) throw SimulationError(SimErrorCode::UnknownTarget, "no system function '" + name + "'");
        switch (spec->id) {
            case Builtin::Delay:
                fi.timerElapsed += kDefaultCycleTime;
                fi.timerDone = fi.timerElapsed >= args.at(0).as_time();
                break;
            case Builtin::WaitCycles:
                ++fi.timerSteps;
                fi.timerDone = fi.timerSteps >= args.at(0).as_int();
                break;
        }
    }

    std::vector<InstanceKey> detached_keys() const { return ordered_keys(true); }

    std::vector<InstanceKey> ordered_keys(bool detachedOnly) const {
        std::vector<std::pair<std::pair<int, int>, InstanceKey>> keys;
        for (const auto& [key, fi] : s_.instances) {
            if (detachedOnly && fi.status != InstanceStatus::Detached) continue;
            const ObjectInfo& obj = topo_.object(key.path);
            keys.push_back({{obj.preorder, obj.functionOrder.at(key.function)}, key});
        }
        std::sort(keys.begin(), keys.end());
        std::vector<InstanceKey> out;
        for (auto& k : keys) out.push_back(std::move(k.second));
        return out;
    }

    std::vector<ActiveNode> active_chain() const {
        std::vector<ActiveNode> chain;
        const FunctionInstance* fi = &s_.instances.at(s_.root);
        while (fi && fi->status == InstanceStatus::Running && fi->activeNode >= 0) {
            chain.push_back({fi->key.str(), node_name(*fi)});
            const Node& n = def(*fi).body->nodes[static_cast<std::size_t>(fi->activeNode)];
            auto key = callee_key(*fi, n);
            fi = nullptr;
            if (key) {
                auto it = s_.instances.find(*key);
                if (it != s_.instances.end()) fi = &it->second;
            }
        }
        return chain;
    }

    ScanState& s_;
    const Topology& topo_;
    std::vector<FiredTransition>* fired_ = nullptr;
};

}  // namespace

const std::vector<std::string>& ScanState::variable_names() const { return topology->varNames; }

Value ScanState::value_of(std::string_view qualifiedName) const {
    return values[static_cast<std::size_t>(topology->var(std::string(qualifiedName)))];
}

const FunctionInstance* ScanState::instance(const InstanceKey& key) const {
    auto it = instances.find(key);
    return it == instances.end() ? nullptr : &it->second;
}

bool ScanState::finished() const {
    const FunctionInstance* r = instance(root);
    if (!r || r->status != InstanceStatus::Completed) return false;
    return std::none_of(instances.begin(), instances.end(),
                        [](const auto& kv) { return kv.second.status == InstanceStatus::Detached; });
}

ScanState init_run(const Model& model, const Invocation& invocation) {
    auto topo = std::make_shared<Topology>();
    topo->model = model;
    ScanState state;
    ObjectInstance tree = instantiate(model, model.root.block, model.root.instance);
    collect(topo->model, tree, *topo, state);

    auto obj = topo->objects.find(invocation.instancePath);
    if (obj == topo->objects.end()) {
        throw SimulationError(SimErrorCode::UnknownTarget, "no object '" + invocation.instancePath + "'");
    }
    auto fn = obj->second.functions.find(invocation.function);
    if (fn == obj->second.functions.end() || !fn->second.body) {
        throw SimulationError(SimErrorCode::UnknownTarget,
                              "'" + invocation.instancePath + "' has no behavior function '" +
                                  invocation.function + "'");
    }
    const auto& params = fn->second.params;
    if (params.size() != invocation.args.size()) {
        throw SimulationError(SimErrorCode::ArityMismatch,
                              "'" + invocation.function + "' expects " + std::to_string(params.size()) +
                                  " argument(s), got " + std::to_string(invocation.args.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].type != invocation.args[i].type()) {
            throw SimulationError(SimErrorCode::TypeMismatch,
                                  "argument '" + params[i].name + "' expects " +
                                      std::string(to_string(params[i].type)));
        }
    }
    state.root = InstanceKey{invocation.instancePath, invocation.function};
    FunctionInstance root;
    root.key = state.root;
    root.args = invocation.args;
    state.instances.emplace(state.root, std::move(root));
    state.topology = std::move(topo);
    return state;
}

CycleRecord step_cycle(ScanState& state, const std::vector<InputLatch>& inputs) {
    return Engine(state).cycle(inputs);
}

std::pair<ScanState, CycleRecord> step_cycle(const ScanState& state, const std::vector<InputLatch>& inputs) {
    ScanState next = state;
    CycleRecord rec = step_cycle(next, inputs);
    return {std::move(next), std::move(rec)};
}

Value evaluate(const ScanState& state, const Expr& expr, const EvalScope& scope) {
    return Reader{state, *state.topology}.eval(expr, scope);
}

bool eval_condition(const ScanState& state, const Expr& expr, const EvalScope& scope) {
    Value v = evaluate(state, expr, scope);
    if (v.type() != TypeTag::Bool) {
        throw SimulationError(SimErrorCode::RuntimeTypeError, "condition is not BOOL");
    }
    return v.as_bool();
}

int Trace::passed() const {
    return static_cast<int>(std::count_if(assertions.begin(), assertions.end(),
                                           [](const AssertionOutcome& a) { return a.passed; }));
}

Trace run(const Model& model, const Scenario& scenario) {
    Trace trace;
    ScanState state = init_run(model, scenario.invocation);
    std::vector<bool> checked(scenario.assertions.size(), false);
    while (!state.finished()) {
        if (state.cycle >= scenario.maxCycles) {
            trace.diverged = true;
            break;
        }
        std::vector<InputLatch> inputs;
        for (const auto& in : scenario.inputs) {
            if (in.cycle == state.cycle) inputs.push_back({in.instancePath, in.value});
        }
        CycleRecord rec = step_cycle(state, inputs);
        for (std::size_t i = 0; i < scenario.assertions.size(); ++i) {
            const Assertion& a = scenario.assertions[i];
            if (a.cycle != rec.cycle) continue;
            checked[i] = true;
            AssertionOutcome out;
            out.cycle = a.cycle;
            out.expr = format_expr(*a.expr);
            out.expected = a.expected;
            out.passed = eval_condition(state, *a.expr, EvalScope{}) == a.expected;
            rec.asserts.push_back(out);
        }
        trace.cycles.push_back(std::move(rec));
    }
    trace.completed = state.finished();
    for (std::size_t i = 0; i < scenario.assertions.size(); ++i) {
        const Assertion& a = scenario.assertions[i];
        if (checked[i]) {
            for (const auto& rec : trace.cycles) {
                if (rec.cycle != a.cycle) continue;
                for (const auto& out : rec.asserts) {
                    if (out.expr == format_expr(*a.expr) && out.expected == a.expected) {
                        trace.assertions.push_back(out);
                        break;
                    }
                }
            }
        } else {
            trace.assertions.push_back({a.cycle, format_expr(*a.expr), a.expected, false, false});
        }
    }
    return trace;
}

namespace {

nlohmann::ordered_json value_json(const Value& v) {
    switch (v.type()) {
        case TypeTag::Bool: return v.as_bool();
        case TypeTag::Int: return v.as_int();
        case TypeTag::Real: return v.as_real();
        case TypeTag::Time: return v.as_time().count();
    }
    return nullptr;
}

}  // namespace

std::string record_to_json(const CycleRecord& r) {
    using J = nlohmann::ordered_json;
    J j;
    j["cycle"] = r.cycle;
    J fired = J::array();
    for (const auto& f : r.fired) {
        fired.push_back(J{{"inst", f.instance}, {"from", f.from}, {"to", f.to}, {"kind", to_string(f.kind)}});
    }
    j["fired"] = fired;
    J active = J::array();
    for (const auto& a : r.active) active.push_back(J{{"inst", a.instance}, {"node", a.node}});
    j["active"] = active;
    J detached = J::array();
    for (const auto& a : r.detached) detached.push_back(J{{"inst", a.instance}, {"node", a.node}});
    j["detached"] = detached;
    J vars = J::object();
    for (const auto& [name, v] : r.vars) vars[name] = value_json(v);
    j["vars"] = vars;
    J asserts = J::array();
    for (const auto& a : r.asserts) {
        asserts.push_back(J{{"expr", a.expr}, {"expected", a.expected}, {"ok", a.passed}});
    }
    j["asserts"] = asserts;
    return j.dump();
}

std::string trace_to_jsonl(const Trace& trace) {
    std::string out;
    for (const auto& r : trace.cycles) {
        out += record_to_json(r);
        out += '\n';
    }
    return out;
}

}  // namespace modat
