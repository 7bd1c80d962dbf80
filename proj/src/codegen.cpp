#include "modat/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>

#include "modat/formatter.hpp"
#include "modat/model_ops.hpp"
#include "modat/validator.hpp"
#include "modat/version.hpp"

namespace modat {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

const std::set<std::string>& st_keywords() {
    static const std::set<std::string> kWords = {
        "ACTION", "AND", "ANY", "ARRAY", "AT", "BOOL", "BY", "BYTE", "CASE", "CONFIGURATION", "CONSTANT",
        "DATE", "DINT", "DO", "DT", "DWORD", "ELSE", "ELSIF", "END_ACTION", "END_CASE", "END_CONFIGURATION",
        "END_FOR", "END_FUNCTION", "END_FUNCTION_BLOCK", "END_IF", "END_INTERFACE", "END_METHOD",
        "END_PROGRAM", "END_REPEAT", "END_RESOURCE", "END_STEP", "END_STRUCT", "END_TRANSITION", "END_TYPE",
        "END_VAR", "END_WHILE", "EXIT", "EXTENDS", "FALSE", "FOR", "FROM", "FUNCTION", "FUNCTION_BLOCK", "IF",
        "IMPLEMENTS", "INT", "INTERFACE", "INTERNAL", "LINT", "LREAL", "LWORD", "METHOD", "MOD", "NOT", "OF",
        "ON", "OR", "OVERRIDE", "PRIVATE", "PROGRAM", "PROTECTED", "PUBLIC", "READ_ONLY", "READ_WRITE", "REAL",
        "REPEAT", "RESOURCE", "RETAIN", "RETURN", "SINT", "STEP", "STRING", "STRUCT", "SUPER", "TASK", "THEN",
        "THIS", "TIME", "TO", "TOD", "TRANSITION", "TRUE", "TYPE", "UDINT", "UINT", "ULINT", "UNTIL", "USINT",
        "VAR", "VAR_ACCESS", "VAR_CONFIG", "VAR_EXTERNAL", "VAR_GLOBAL", "VAR_INPUT", "VAR_IN_OUT",
        "VAR_OUTPUT", "VAR_TEMP", "WHILE", "WITH", "WORD", "XOR", "MAIN"};
    return kWords;
}

std::string st_type(TypeTag t) {
    switch (t) {
        case TypeTag::Bool: return "BOOL";
        case TypeTag::Int: return "DINT";
        case TypeTag::Real: return "LREAL";
        case TypeTag::Time: return "TIME";
    }
    return "BOOL";
}

char slot_letter(TypeTag t) {
    switch (t) {
        case TypeTag::Bool: return 'B';
        case TypeTag::Int: return 'I';
        case TypeTag::Real: return 'R';
        case TypeTag::Time: return 'T';
    }
    return 'B';
}

std::string st_real(double r) {
    std::string s = format_real(std::fabs(r));
    std::string mantissa = s, exponent;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mantissa = s.substr(0, e);
        exponent = s.substr(e + 1);
        if (!exponent.empty() && exponent[0] == '+') exponent.erase(0, 1);
    }
    if (mantissa.find('.') == std::string::npos) mantissa += ".0";
    std::string out = mantissa + (exponent.empty() ? "" : "E" + exponent);
    return std::signbit(r) ? "(-" + out + ")" : out;
}

std::string st_literal(const Value& v) {
    switch (v.type()) {
        case TypeTag::Bool: return v.as_bool() ? "TRUE" : "FALSE";
        case TypeTag::Int:
            if (v.as_int() == std::numeric_limits<std::int32_t>::min()) return "(-2147483647 - 1)";
            return v.as_int() < 0 ? "(" + std::to_string(v.as_int()) + ")" : std::to_string(v.as_int());
        case TypeTag::Real: return st_real(v.as_real());
        case TypeTag::Time: {
            auto ms = v.as_time().count();
            if (ms < 0) return "(T#0ms - T#" + std::to_string(-ms) + "ms)";
            return "T#" + std::to_string(ms) + "ms";
        }
    }
    return "";
}

std::string cmd(StCommand c) { return std::to_string(static_cast<int>(c)); }

// Internal operations, only issued from inside a function block.
constexpr int kOpStart = 11;
constexpr int kOpDo = 12;

struct Writer {
    std::string out;
    int depth = 0;

    void line(const std::string& s) {
        if (s.empty()) {
            out += '\n';
            return;
        }
        out.append(static_cast<std::size_t>(depth) * 4, ' ');
        out += s;
        out += '\n';
    }
    void in() { ++depth; }
    void out_() { --depth; }
};

// ---------------------------------------------------------------------------
// Naming

struct ParamName {
    std::string st;
    TypeTag type;
};

struct FnNames {
    int index = 0;  // 1-based position in the effective interface
    std::string method;
    std::string state, done, paused, detached, did, last;
    std::string tElapsed, tSteps, tDone;
    std::map<std::string, ParamName> params;
};

enum class Section { Input, Output, Local };

struct Decl {
    Section section;
    std::string name;
    std::string type;
    std::string init;
    std::string attr;  // model attribute name, for initial-value patching
};

struct BlockNames {
    NameMangler scope;
    std::map<std::string, std::string> attrs;
    std::map<std::string, std::string> parts;
    std::map<std::string, FnNames> fns;
    std::vector<Decl> ownDecls;  // declared at this level of the family
};

bool uses_timer(const FunctionDef& f) {
    if (!f.body) return false;
    return std::any_of(f.body->nodes.begin(), f.body->nodes.end(), [](const Node& n) {
        auto* c = std::get_if<CallAction>(&n.action);
        return c && c->target[0] == kSystemLane;
    });
}

struct PartInfo {
    std::string st;
    std::string block;
    bool component = false;
};

class Generator {
public:
    Generator(const Model& m, const CodegenOptions& opt) : m_(m), opt_(opt) {
        for (const auto& b : m.blocks) {
            for (const auto& f : b.functions) count_slots(f.params);
        }
    }

    STUnit run() {
        STUnit unit;
        unit.options = opt_;
        for (const auto& b : m_.blocks) {
            unit.pous.push_back({fb_name(b.name), emit_block(b)});
        }
        unit.pous.push_back({"Main", emit_main(unit)});
        return unit;
    }

    const BlockNames& names(const std::string& block) {
        if (auto it = names_.find(block); it != names_.end()) return it->second;
        const BlockDef& b = *m_.find_block(block);
        BlockNames n;
        bool component = b.kind == BlockKind::Component;
        if (b.base) {
            n = names(*b.base);
            n.ownDecls.clear();
        } else {
            n.scope = NameMangler(reserved(component));
        }
        auto eff = effective_attributes(m_, block);
        for (const auto& a : b.attributes) {
            if (n.attrs.count(a.name)) continue;
            std::string st = a.name == kSignal && component ? std::string(kSignal) : n.scope(a.name);
            n.attrs[a.name] = st;
            const AttributeDef& e = *std::find_if(eff.begin(), eff.end(),
                                                  [&](const AttributeDef& x) { return x.name == a.name; });
            Section sec = component && e.io == IoDirection::Input ? Section::Input : Section::Output;
            n.ownDecls.push_back({sec, st, st_type(e.type), st_literal(e.initial), a.name});
        }
        for (const auto& p : b.parts) {
            std::string st = n.scope(p.name);
            n.parts[p.name] = st;
            n.ownDecls.push_back({Section::Local, st, fb_name(p.block), "", ""});
        }
        auto iface = effective_interface(m_, block);
        for (const auto& f : b.functions) {
            bool fresh = !n.fns.count(f.name);
            FnNames& fn = n.fns[f.name];
            if (fresh) {
                fn.method = n.scope("fn_" + f.name);
                fn.state = n.scope(f.name + "_state");
                fn.done = n.scope(f.name + "_done");
                fn.paused = n.scope(f.name + "_paused");
                fn.detached = n.scope(f.name + "_detached");
                fn.did = n.scope(f.name + "_did");
                fn.last = n.scope(f.name + "_last");
                n.ownDecls.push_back({Section::Output, fn.state, "INT", "0", ""});
                n.ownDecls.push_back({Section::Output, fn.done, "BOOL", "FALSE", ""});
                n.ownDecls.push_back({Section::Local, fn.paused, "BOOL", "FALSE", ""});
                n.ownDecls.push_back({Section::Local, fn.detached, "BOOL", "FALSE", ""});
                n.ownDecls.push_back({Section::Local, fn.did, "BOOL", "FALSE", ""});
                n.ownDecls.push_back({Section::Local, fn.last, "DINT", "-1", ""});
            }
            for (const auto& p : f.params) {
                auto it = fn.params.find(p.name);
                if (it != fn.params.end() && it->second.type == p.type) continue;
                std::string st = n.scope(f.name + "_" + p.name);
                fn.params[p.name] = {st, p.type};
                n.ownDecls.push_back({Section::Local, st, st_type(p.type), st_literal(Value::zero(p.type)), ""});
            }
            if (uses_timer(f) && fn.tElapsed.empty()) {
                fn.tElapsed = n.scope(f.name + "_tElapsed");
                fn.tSteps = n.scope(f.name + "_tSteps");
                fn.tDone = n.scope(f.name + "_tDone");
                n.ownDecls.push_back({Section::Local, fn.tElapsed, "TIME", "T#0ms", ""});
                n.ownDecls.push_back({Section::Local, fn.tSteps, "DINT", "0", ""});
                n.ownDecls.push_back({Section::Local, fn.tDone, "BOOL", "FALSE", ""});
            }
        }
        for (std::size_t i = 0; i < iface.size(); ++i) {
            if (auto it = n.fns.find(iface[i].function.name); it != n.fns.end()) {
                it->second.index = static_cast<int>(i) + 1;
            }
        }
        return names_.emplace(block, std::move(n)).first->second;
    }

    std::string fb_name(const std::string& block) {
        if (auto it = fbNames_.find(block); it != fbNames_.end()) return it->second;
        std::string name = pouScope_("FB_" + block);
        fbNames_[block] = name;
        return name;
    }

    std::vector<std::pair<TypeTag, std::string>> slot_names(const std::vector<Param>& params, char prefix) const {
        std::map<TypeTag, int> seen;
        std::vector<std::pair<TypeTag, std::string>> out;
        for (const auto& p : params) {
            int k = ++seen[p.type];
            out.emplace_back(p.type, std::string(1, prefix) + slot_letter(p.type) + std::to_string(k));
        }
        return out;
    }

    std::vector<std::pair<std::string, TypeTag>> all_slots(char prefix) const {
        std::vector<std::pair<std::string, TypeTag>> out;
        for (TypeTag t : {TypeTag::Bool, TypeTag::Int, TypeTag::Real, TypeTag::Time}) {
            auto it = slots_.find(t);
            int n = it == slots_.end() ? 0 : it->second;
            for (int i = 1; i <= n; ++i) out.emplace_back(std::string(1, prefix) + slot_letter(t) + std::to_string(i), t);
        }
        return out;
    }

private:
    void count_slots(const std::vector<Param>& params) {
        std::map<TypeTag, int> c;
        for (const auto& p : params) ++c[p.type];
        for (auto [t, n] : c) slots_[t] = std::max(slots_[t], n);
    }

    std::set<std::string> reserved(bool component) const {
        std::set<std::string> r = st_keywords();
        for (const char* s : {"cmd", "value", "fn", "sel", "cycle", "rDone", "rDetached", "curOp", "curFn", "phaseK",
                              "opv", "fv", "op", "f", "k", "drive", "pick", "dispatch", "route", "phase_parts",
                              "query", "init", "sync"}) {
            r.insert(upper(s));
        }
        if (!component) {
            for (const auto& [s, t] : all_slots('a')) r.insert(upper(s));
            for (const auto& [s, t] : all_slots('t')) r.insert(upper(s));
        }
        return r;
    }

    // --- expressions ---------------------------------------------------

    struct Ctx {
        const BlockDef* host;
        const BlockNames* self;
        const FnNames* fn;
        std::map<std::string, PartInfo> parts;
    };

    Ctx context(const BlockDef& host, const FunctionDef& def) {
        Ctx c;
        c.host = &host;
        c.self = &names(host.name);
        c.fn = &c.self->fns.at(def.name);
        for (const auto& p : effective_parts(m_, host.name)) {
            c.parts[p.name] = {c.self->parts.at(p.name), p.block,
                               m_.find_block(p.block)->kind == BlockKind::Component};
        }
        return c;
    }

    std::string ref(const std::vector<std::string>& path, const Ctx& c) {
        if (path.size() == 1) return c.fn->params.at(path[0]).st;
        if (path[0] == kSelfLane) return c.self->attrs.at(path[1]);
        const PartInfo& p = c.parts.at(path[0]);
        return p.st + "." + names(p.block).attrs.at(path[1]);
    }

    std::string expr(const Expr& e, const Ctx& c, bool top = true) {
        if (auto* v = std::get_if<Value>(&e.node)) return st_literal(*v);
        if (auto* r = std::get_if<RefExpr>(&e.node)) return ref(r->path, c);
        std::string s;
        if (auto* u = std::get_if<UnaryExpr>(&e.node)) {
            s = (u->op == UnaryOp::Not ? "NOT " : "-") + expr(*u->operand, c, false);
        } else {
            const auto& b = std::get<BinaryExpr>(e.node);
            const char* op = "";
            switch (b.op) {
                case BinaryOp::Or: op = "OR"; break;
                case BinaryOp::And: op = "AND"; break;
                case BinaryOp::Eq: op = "="; break;
                case BinaryOp::Ne: op = "<>"; break;
                case BinaryOp::Lt: op = "<"; break;
                case BinaryOp::Le: op = "<="; break;
                case BinaryOp::Gt: op = ">"; break;
                case BinaryOp::Ge: op = ">="; break;
                case BinaryOp::Add: op = "+"; break;
                case BinaryOp::Sub: op = "-"; break;
                case BinaryOp::Mul: op = "*"; break;
            }
            s = expr(*b.lhs, c, false) + " " + op + " " + expr(*b.rhs, c, false);
        }
        return top ? s : "(" + s + ")";
    }

    void assignments(Writer& w, const std::vector<Assignment>& as, const Ctx& c) {
        for (const auto& a : as) w.line(c.self->attrs.at(a.target[1]) + " := " + expr(*a.value, c) + ";");
    }

    // --- function operations ---------------------------------------------

    struct Callee {
        bool self = false;
        std::string part;  // ST instance name
        std::string block;
        std::string function;
        int index = 0;
        const FunctionDef* def = nullptr;
    };

    std::optional<Callee> callee(const Node& n, const Ctx& c) {
        auto* call = std::get_if<CallAction>(&n.action);
        if (!call || call->target[0] == kSystemLane) return std::nullopt;
        Callee out;
        out.function = call->function;
        if (call->target[0] == kSelfLane) {
            out.self = true;
            out.block = c.host->name;
        } else {
            const PartInfo& p = c.parts.at(call->target[0]);
            if (p.component) return std::nullopt;
            out.part = p.st;
            out.block = p.block;
        }
        out.index = names(out.block).fns.at(out.function).index;
        return out;
    }

    std::string part_call(const std::string& part, StCommand command, int fnIndex, const std::string& extra = "") {
        return part + "(cmd := " + cmd(command) + ", fn := " + std::to_string(fnIndex) +
               ", sel := 0, cycle := cycle" + extra + ");";
    }

    void timer_reset(Writer& w, const FnNames& fn, const FunctionDef& def) {
        if (!uses_timer(def)) return;
        w.line(fn.tElapsed + " := T#0ms;");
        w.line(fn.tSteps + " := 0;");
        w.line(fn.tDone + " := FALSE;");
    }

    void enter(Writer& w, const Ctx& c, const FunctionDef& def, const std::optional<std::string>& target) {
        const FnNames& fn = *c.fn;
        if (!target) {
            w.line(fn.state + " := -1;");
            w.line(fn.detached + " := FALSE;");
            timer_reset(w, fn, def);
            return;
        }
        const Behavior& b = *def.body;
        std::size_t idx = 0;
        while (b.nodes[idx].id != *target) ++idx;
        w.line(fn.state + " := " + std::to_string(idx + 1) + ";");
        w.line(fn.did + " := FALSE;");
        timer_reset(w, fn, def);
        assignments(w, b.nodes[idx].entry, c);
    }

    std::string running(const FnNames& g) {
        return g.state + " > 0 AND NOT " + g.paused + " AND NOT " + g.detached;
    }

    std::string completion(const Node& n, const Ctx& c) {
        const FnNames& fn = *c.fn;
        auto* call = std::get_if<CallAction>(&n.action);
        if (call && call->target[0] == kSystemLane) return fn.did + " AND " + fn.tDone;
        if (auto cal = callee(n, c)) {
            if (cal->self) return fn.did + " AND (" + c.self->fns.at(cal->function).state + " = -1)";
            return fn.did + " AND (" + cal->part + "." + names(cal->block).fns.at(cal->function).state + " = -1)";
        }
        return fn.did;
    }

    void fire(Writer& w, const Ctx& c, const FunctionDef& def, const Node& n, const Transition& t) {
        const FnNames& fn = *c.fn;
        assignments(w, n.exit, c);
        if (t.kind == TransitionKind::Condition) {
            if (auto cal = callee(n, c)) {
                Policy p = t.policy.value_or(Policy::Restart);
                if (cal->self) {
                    const FnNames& g = c.self->fns.at(cal->function);
                    if (p == Policy::Restart) {
                        w.line("IF " + fn.did + " THEN");
                        w.in();
                        w.line("curOp := " + cmd(StCommand::Restart) + ";");
                        w.line("curFn := " + std::to_string(cal->index) + ";");
                    } else {
                        w.line("IF " + fn.did + " AND " + running(g) + " THEN");
                        w.in();
                        w.line((p == Policy::Resume ? g.paused : g.detached) + " := TRUE;");
                    }
                } else {
                    StCommand command = p == Policy::Resume    ? StCommand::Pause
                                        : p == Policy::Restart ? StCommand::Restart
                                                               : StCommand::Detach;
                    w.line("IF " + fn.did + " THEN");
                    w.in();
                    w.line(part_call(cal->part, command, cal->index));
                }
                w.out_();
                w.line("END_IF;");
            }
        }
        assignments(w, t.operation, c);
        enter(w, c, def, t.target);
    }

    void bind(Writer& w, const Ctx& c, const FunctionDef& def) {
        auto slots = slot_names(def.params, 't');
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            w.line(c.fn->params.at(def.params[i].name).st + " := " + slots[i].second + ";");
        }
    }

    void do_action(Writer& w, const Ctx& c, const Node& n) {
        const FnNames& fn = *c.fn;
        if (auto* set = std::get_if<SetAction>(&n.action)) {
            assignments(w, set->assignments, c);
            return;
        }
        const auto& call = std::get<CallAction>(n.action);
        const std::string& lane = call.target[0];
        if (lane == kSystemLane) {
            const std::string arg = expr(*call.args.at(0), c, false);
            if (call.function == "delay") {
                w.line(fn.tElapsed + " := " + fn.tElapsed + " + T#" + std::to_string(kDefaultCycle) + "ms;");
                w.line(fn.tDone + " := " + fn.tElapsed + " >= " + arg + ";");
            } else {
                w.line(fn.tSteps + " := " + fn.tSteps + " + 1;");
                w.line(fn.tDone + " := " + fn.tSteps + " >= " + arg + ";");
            }
            return;
        }
        if (lane != kSelfLane && c.parts.at(lane).component) {
            if (call.function == "setSignal") {
                w.line(c.parts.at(lane).st + "(cmd := 1, value := " + expr(*call.args.at(0), c) + ");");
            }
            return;
        }
        Callee cal = *callee(n, c);
        const FunctionDef calleeDef = *find_effective_function(m_, cal.block, cal.function);
        if (cal.self) {
            auto slots = slot_names(calleeDef.params, 't');
            for (std::size_t i = 0; i < call.args.size(); ++i) {
                w.line(slots[i].second + " := " + expr(*call.args[i], c) + ";");
            }
            w.line("curOp := " + cmd(StCommand::Call) + ";");
            w.line("curFn := " + std::to_string(cal.index) + ";");
            return;
        }
        std::string extra;
        auto slots = slot_names(calleeDef.params, 'a');
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            extra += ", " + slots[i].second + " := " + expr(*call.args[i], c);
        }
        w.line(part_call(cal.part, StCommand::Call, cal.index, extra));
    }

    void function_ops(Writer& w, const BlockDef& host, const FunctionDef& def, const std::string& opVar) {
        Ctx c = context(host, def);
        const FnNames& fn = *c.fn;
        const Behavior& b = *def.body;
        const std::string self = std::to_string(fn.index);
        auto jump = [&](int op) {
            w.line("curOp := " + std::to_string(op) + ";");
            w.line("curFn := " + self + ";");
        };

        w.line("CASE " + opVar + " OF");
        w.in();

        w.line(cmd(StCommand::Call) + ": (* call *)");
        w.in();
        w.line("IF " + fn.state + " = 0 OR " + fn.state + " = -1 THEN");
        w.in();
        bind(w, c, def);
        jump(kOpStart);
        w.out_();
        w.line("ELSE");
        w.in();
        w.line(fn.paused + " := FALSE;");
        w.line(fn.detached + " := FALSE;");
        jump(static_cast<int>(StCommand::Step));
        w.out_();
        w.line("END_IF;");
        w.out_();

        w.line(cmd(StCommand::Step) + ": (* step *)");
        w.in();
        w.line("IF " + fn.last + " <> cycle THEN");
        w.in();
        w.line("IF " + fn.state + " = 0 OR " + fn.state + " = -1 THEN");
        w.in();
        jump(kOpStart);
        w.out_();
        w.line("ELSE");
        w.in();
        w.line(fn.last + " := cycle;");
        w.line("CASE " + fn.state + " OF");
        w.in();
        for (std::size_t i = 0; i < b.nodes.size(); ++i) {
            const Node& n = b.nodes[i];
            w.line(std::to_string(i + 1) + ": (* " + n.id + " *)");
            w.in();
            bool first = true;
            for (const auto& t : b.transitions) {
                if (t.source != n.id) continue;
                std::string cond = t.kind == TransitionKind::Completion ? completion(n, c) : expr(*t.condition, c);
                w.line((first ? "IF " : "ELSIF ") + cond + " THEN");
                first = false;
                w.in();
                fire(w, c, def, n, t);
                w.out_();
            }
            if (first) {
                jump(kOpDo);
            } else {
                w.line("ELSE");
                w.in();
                jump(kOpDo);
                w.out_();
                w.line("END_IF;");
            }
            w.out_();
        }
        w.out_();
        w.line("END_CASE;");
        w.out_();
        w.line("END_IF;");
        w.out_();
        w.line("END_IF;");
        w.out_();

        if (!def.params.empty()) {
            w.line(cmd(StCommand::Bind) + ": (* bind *)");
            w.in();
            bind(w, c, def);
            w.out_();
        }

        w.line(cmd(StCommand::Restart) + ": (* restart *)");
        w.in();
        w.line("IF " + running(fn) + " THEN");
        w.in();
        std::vector<std::pair<std::size_t, Callee>> calls;
        for (std::size_t i = 0; i < b.nodes.size(); ++i) {
            if (auto cal = callee(b.nodes[i], c)) calls.emplace_back(i, *cal);
        }
        if (!calls.empty()) {
            w.line("CASE " + fn.state + " OF");
            w.in();
            for (const auto& [i, cal] : calls) {
                w.line(std::to_string(i + 1) + ":");
                w.in();
                if (cal.self) {
                    w.line("curOp := " + cmd(StCommand::Restart) + ";");
                    w.line("curFn := " + std::to_string(cal.index) + ";");
                } else {
                    w.line(part_call(cal.part, StCommand::Restart, cal.index));
                }
                w.out_();
            }
            w.out_();
            w.line("END_CASE;");
        }
        w.line(fn.state + " := 0;");
        w.line(fn.paused + " := FALSE;");
        w.line(fn.detached + " := FALSE;");
        w.line(fn.did + " := FALSE;");
        timer_reset(w, fn, def);
        w.out_();
        w.line("END_IF;");
        w.out_();

        for (auto [command, flag] : {std::pair{StCommand::Pause, fn.paused}, std::pair{StCommand::Detach, fn.detached}}) {
            w.line(cmd(command) + (command == StCommand::Pause ? ": (* pause *)" : ": (* detach *)"));
            w.in();
            w.line("IF " + running(fn) + " THEN");
            w.in();
            w.line(flag + " := TRUE;");
            w.out_();
            w.line("END_IF;");
            w.out_();
        }

        w.line(std::to_string(kOpStart) + ": (* start *)");
        w.in();
        w.line(fn.last + " := cycle;");
        w.line(fn.paused + " := FALSE;");
        w.line(fn.detached + " := FALSE;");
        timer_reset(w, fn, def);
        for (const auto& t : b.transitions) {
            if (t.source) continue;
            assignments(w, t.operation, c);
            enter(w, c, def, t.target);
            if (t.target) jump(kOpDo);
            break;
        }
        w.out_();

        w.line(std::to_string(kOpDo) + ": (* do *)");
        w.in();
        w.line(fn.did + " := TRUE;");
        w.line("CASE " + fn.state + " OF");
        w.in();
        for (std::size_t i = 0; i < b.nodes.size(); ++i) {
            Writer body;
            body.depth = w.depth + 1;
            do_action(body, c, b.nodes[i]);
            if (body.out.empty()) continue;
            w.line(std::to_string(i + 1) + ":");
            w.out += body.out;
        }
        w.out_();
        w.line("END_CASE;");
        w.out_();

        w.out_();
        w.line("END_CASE;");
    }

    // --- function blocks -------------------------------------------------

    static std::string decl_line(const Decl& d) {
        return d.name + " : " + d.type + (d.init.empty() ? "" : " := " + d.init) + ";";
    }

    void sections(Writer& w, const std::vector<Decl>& decls) {
        for (auto [sec, kw] : {std::pair{Section::Input, "VAR_INPUT"}, std::pair{Section::Output, "VAR_OUTPUT"},
                               std::pair{Section::Local, "VAR"}}) {
            bool any = std::any_of(decls.begin(), decls.end(), [&](const Decl& d) { return d.section == sec; });
            if (!any) continue;
            w.line(kw);
            w.in();
            for (const auto& d : decls) {
                if (d.section == sec) w.line(decl_line(d));
            }
            w.out_();
            w.line("END_VAR");
        }
    }

    std::vector<Decl> fixed_decls(bool component, const BlockDef& b) {
        std::vector<Decl> d;
        d.push_back({Section::Input, "cmd", "INT", "0", ""});
        if (component) {
            auto attrs = effective_attributes(m_, b.name);
            const AttributeDef* sig = find_signal(attrs);
            if (sig && sig->io != IoDirection::Input) {
                d.push_back({Section::Input, "value", st_type(sig->type), st_literal(Value::zero(sig->type)), ""});
            }
            return d;
        }
        d.push_back({Section::Input, "fn", "INT", "0", ""});
        d.push_back({Section::Input, "sel", "DINT", "0", ""});
        d.push_back({Section::Input, "cycle", "DINT", "0", ""});
        for (const auto& [s, t] : all_slots('a')) d.push_back({Section::Input, s, st_type(t), st_literal(Value::zero(t)), ""});
        d.push_back({Section::Output, "rDone", "BOOL", "FALSE", ""});
        d.push_back({Section::Output, "rDetached", "BOOL", "FALSE", ""});
        d.push_back({Section::Local, "curOp", "INT", "0", ""});
        d.push_back({Section::Local, "curFn", "INT", "0", ""});
        d.push_back({Section::Local, "phaseK", "INT", "0", ""});
        d.push_back({Section::Local, "opv", "INT", "0", ""});
        d.push_back({Section::Local, "fv", "INT", "0", ""});
        for (const auto& [s, t] : all_slots('t')) d.push_back({Section::Local, s, st_type(t), st_literal(Value::zero(t)), ""});
        return d;
    }

    // Full declaration list of a flattened block, initial values from the variant.
    std::vector<Decl> flat_decls(const BlockDef& b) {
        std::vector<const BlockDef*> chain{&b};
        while (chain.back()->base) chain.push_back(m_.find_block(*chain.back()->base));
        std::vector<Decl> out = fixed_decls(b.kind == BlockKind::Component, b);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const auto& own = names((*it)->name).ownDecls;
            out.insert(out.end(), own.begin(), own.end());
        }
        auto eff = effective_attributes(m_, b.name);
        for (auto& d : out) {
            if (d.attr.empty()) continue;
            for (const auto& a : eff) {
                if (a.name == d.attr) d.init = st_literal(a.initial);
            }
        }
        return out;
    }

    struct Layout {
        std::vector<InterfaceEntry> iface;
        std::vector<PartDef> parts;
        std::vector<int> offsets;  // pre-order offset of each part's subtree
        std::vector<int> sizes;
    };

    int subtree_size(const std::string& block) {
        int n = 1;
        for (const auto& p : effective_parts(m_, block)) n += subtree_size(p.block);
        return n;
    }

    Layout layout(const BlockDef& b) {
        Layout l;
        l.iface = effective_interface(m_, b.name);
        l.parts = effective_parts(m_, b.name);
        int off = 1;
        for (const auto& p : l.parts) {
            int size = subtree_size(p.block);
            l.offsets.push_back(off);
            l.sizes.push_back(size);
            off += size;
        }
        return l;
    }

    bool composite_part(const PartDef& p) const { return m_.find_block(p.block)->kind != BlockKind::Component; }

    std::string forward_args() const {
        std::string s;
        for (const auto& [name, t] : all_slots('a')) s += ", " + name + " := " + name;
        return s;
    }

    void route_stmts(Writer& w, const BlockDef& b, const Layout& l, std::size_t fromPart, bool superFallback) {
        const BlockNames& n = names(b.name);
        bool first = true;
        for (std::size_t i = fromPart; i < l.parts.size(); ++i) {
            if (!composite_part(l.parts[i])) continue;
            const std::string& st = n.parts.at(l.parts[i].name);
            int lo = l.offsets[i], hi = l.offsets[i] + l.sizes[i] - 1;
            w.line(std::string(first ? "IF" : "ELSIF") + " sel >= " + std::to_string(lo) + " AND sel <= " +
                   std::to_string(hi) + " THEN");
            first = false;
            w.in();
            w.line(st + "(cmd := cmd, fn := fn, sel := sel - " + std::to_string(lo) + ", cycle := cycle" +
                   forward_args() + ");");
            w.line("rDone := " + st + ".rDone;");
            w.out_();
        }
        if (superFallback) {
            if (first) {
                w.line("SUPER^.route();");
                return;
            }
            w.line("ELSE");
            w.in();
            w.line("SUPER^.route();");
            w.out_();
        }
        if (!first) w.line("END_IF;");
    }

    void pick_stmts(Writer& w, const BlockDef& b, const Layout& l, const std::string& kVar, std::size_t from,
                    bool superFallback) {
        const BlockNames& n = names(b.name);
        if (from >= l.iface.size()) {
            if (superFallback) w.line("SUPER^.pick(k := " + kVar + ");");
            return;
        }
        w.line("CASE " + kVar + " OF");
        w.in();
        for (std::size_t i = from; i < l.iface.size(); ++i) {
            const FnNames& fn = n.fns.at(l.iface[i].function.name);
            w.line(std::to_string(i + 1) + ":");
            w.in();
            w.line("IF " + fn.detached + " THEN");
            w.in();
            w.line("curOp := " + cmd(StCommand::Step) + ";");
            w.line("curFn := " + std::to_string(i + 1) + ";");
            w.out_();
            w.line("END_IF;");
            w.out_();
        }
        w.out_();
        if (superFallback) {
            w.line("ELSE");
            w.in();
            w.line("SUPER^.pick(k := " + kVar + ");");
            w.out_();
        }
        w.line("END_CASE;");
    }

    void phase_parts_stmts(Writer& w, const BlockDef& b, const Layout& l, std::size_t fromFn, std::size_t fromPart,
                           bool superFirst) {
        const BlockNames& n = names(b.name);
        std::vector<std::string> flags;
        if (superFirst) {
            w.line("SUPER^.phase_parts();");
            flags.push_back("rDetached");
        }
        for (std::size_t i = fromFn; i < l.iface.size(); ++i) flags.push_back(n.fns.at(l.iface[i].function.name).detached);
        for (std::size_t i = fromPart; i < l.parts.size(); ++i) {
            if (!composite_part(l.parts[i])) continue;
            const std::string& st = n.parts.at(l.parts[i].name);
            w.line(st + "(cmd := " + cmd(StCommand::Phase) + ", fn := 0, sel := 0, cycle := cycle);");
            flags.push_back(st + ".rDetached");
        }
        std::string e;
        for (const auto& f : flags) e += (e.empty() ? "" : " OR ") + f;
        w.line("rDetached := " + (e.empty() ? std::string("FALSE") : e) + ";");
    }

    void query_stmts(Writer& w, const BlockDef& b, const Layout& l, std::size_t from, bool superFallback) {
        const BlockNames& n = names(b.name);
        if (from >= l.iface.size()) {
            if (superFallback) w.line("SUPER^.query();");
            return;
        }
        w.line("CASE fn OF");
        w.in();
        for (std::size_t i = from; i < l.iface.size(); ++i) {
            w.line(std::to_string(i + 1) + ":");
            w.in();
            w.line("rDone := " + n.fns.at(l.iface[i].function.name).state + " = -1;");
            w.out_();
        }
        w.out_();
        if (superFallback) {
            w.line("ELSE");
            w.in();
            w.line("SUPER^.query();");
            w.out_();
        }
        w.line("END_CASE;");
    }

    void sync_stmts(Writer& w, const BlockDef& b, const Layout& l, std::size_t from) {
        const BlockNames& n = names(b.name);
        for (std::size_t i = from; i < l.iface.size(); ++i) {
            const FnNames& fn = n.fns.at(l.iface[i].function.name);
            w.line(fn.done + " := " + fn.state + " = -1;");
        }
    }

    void drive_loop(Writer& w, const BlockDef& b, const Layout& l, bool methods) {
        w.line("WHILE curOp <> 0 OR (phaseK > 0 AND phaseK <= " + std::to_string(l.iface.size()) + ") DO");
        w.in();
        w.line("IF curOp = 0 THEN");
        w.in();
        if (methods) {
            w.line("THIS^.pick(k := phaseK);");
        } else {
            pick_stmts(w, b, l, "phaseK", 0, false);
        }
        w.line("phaseK := phaseK + 1;");
        w.out_();
        w.line("ELSE");
        w.in();
        w.line("opv := curOp;");
        w.line("fv := curFn;");
        w.line("curOp := 0;");
        if (methods) {
            w.line("THIS^.dispatch(op := opv, f := fv);");
        } else if (!l.iface.empty()) {
            w.line("CASE fv OF");
            w.in();
            for (std::size_t i = 0; i < l.iface.size(); ++i) {
                w.line(std::to_string(i + 1) + ": (* " + l.iface[i].function.name + " *)");
                w.in();
                function_ops(w, b, *find_effective_function(m_, b.name, l.iface[i].function.name), "opv");
                w.out_();
            }
            w.out_();
            w.line("END_CASE;");
        }
        w.out_();
        w.line("END_IF;");
        w.out_();
        w.line("END_WHILE;");
    }

    void copy_slots(Writer& w) {
        auto a = all_slots('a');
        auto t = all_slots('t');
        for (std::size_t i = 0; i < a.size(); ++i) w.line(t[i].first + " := " + a[i].first + ";");
    }

    void composite_body(Writer& w, const BlockDef& b, const Layout& l, bool methods) {
        copy_slots(w);
        bool routes = methods || std::any_of(l.parts.begin(), l.parts.end(),
                                             [&](const PartDef& p) { return composite_part(p); });
        if (routes) {
            w.line("IF sel > 0 THEN");
            w.in();
            if (methods) {
                w.line("THIS^.route();");
            } else {
                route_stmts(w, b, l, 0, false);
            }
            w.out_();
        }
        w.line(std::string(routes ? "ELSIF" : "IF") + " cmd = " + cmd(StCommand::Phase) + " THEN");
        w.in();
        w.line("curOp := 0;");
        w.line("phaseK := 1;");
        if (methods) {
            w.line("THIS^.drive();");
            w.line("THIS^.phase_parts();");
        } else {
            drive_loop(w, b, l, false);
            phase_parts_stmts(w, b, l, 0, 0, false);
        }
        w.out_();
        w.line("ELSIF cmd = " + cmd(StCommand::Query) + " THEN");
        w.in();
        if (methods) {
            w.line("THIS^.query();");
        } else {
            query_stmts(w, b, l, 0, false);
        }
        w.out_();
        if (methods) {
            w.line("ELSIF cmd = " + cmd(StCommand::Init) + " THEN");
            w.in();
            w.line("THIS^.init();");
            w.out_();
        }
        w.line("ELSE");
        w.in();
        w.line("curOp := cmd;");
        w.line("curFn := fn;");
        w.line("phaseK := 0;");
        if (methods) {
            w.line("THIS^.drive();");
        } else {
            drive_loop(w, b, l, false);
        }
        w.out_();
        w.line("END_IF;");
        if (methods) {
            w.line("THIS^.sync();");
        } else {
            sync_stmts(w, b, l, 0);
        }
    }

    void method(Writer& w, const std::string& name, bool override, const std::vector<Decl>& inputs,
                const std::function<void(Writer&)>& body) {
        w.line("");
        w.line(std::string("METHOD ") + (override ? "OVERRIDE " : "") + name);
        w.in();
        if (!inputs.empty()) {
            w.line("VAR_INPUT");
            w.in();
            for (const auto& d : inputs) w.line(decl_line(d));
            w.out_();
            w.line("END_VAR");
        }
        body(w);
        w.out_();
        w.line("END_METHOD");
    }

    std::string emit_block(const BlockDef& b) {
        Writer w;
        bool component = b.kind == BlockKind::Component;
        bool extends = opt_.oop && b.base;
        w.line("FUNCTION_BLOCK " + fb_name(b.name) + (extends ? " EXTENDS " + fb_name(*b.base) : ""));
        std::vector<Decl> decls;
        if (!opt_.oop) {
            decls = flat_decls(b);
        } else {
            if (!b.base) decls = fixed_decls(component, b);
            const auto& own = names(b.name).ownDecls;
            decls.insert(decls.end(), own.begin(), own.end());
        }
        sections(w, decls);

        if (component) {
            component_block(w, b, extends);
        } else if (!opt_.oop) {
            composite_body(w, b, layout(b), false);
        } else {
            oop_composite(w, b, extends);
        }
        w.line("END_FUNCTION_BLOCK");
        return w.out;
    }

    void component_block(Writer& w, const BlockDef& b, bool extends) {
        auto attrs = effective_attributes(m_, b.name);
        const AttributeDef* sig = find_signal(attrs);
        bool settable = sig && sig->io != IoDirection::Input;
        if (extends) {
            w.line("SUPER^();");
        } else if (settable || opt_.oop) {
            w.line("CASE cmd OF");
            w.in();
            if (settable) w.line("1: Signal := value;");
            if (opt_.oop) w.line(cmd(StCommand::Init) + ": THIS^.init();");
            w.out_();
            w.line("END_CASE;");
        }
        if (opt_.oop) {
            method(w, "init", extends, {}, [&](Writer& mw) {
                if (extends) mw.line("SUPER^.init();");
                initial_overrides(mw, b);
            });
        }
    }

    // Variant initial values, applied by the init method in EXTENDS emission.
    void initial_overrides(Writer& w, const BlockDef& b) {
        if (!b.base) return;
        const BlockNames& n = names(b.name);
        auto baseAttrs = effective_attributes(m_, *b.base);
        for (const auto& a : b.attributes) {
            for (const auto& ba : baseAttrs) {
                if (ba.name == a.name) w.line(n.attrs.at(a.name) + " := " + st_literal(a.initial) + ";");
            }
        }
    }

    void oop_composite(Writer& w, const BlockDef& b, bool extends) {
        Layout l = layout(b);
        std::size_t baseFns = 0, baseParts = 0;
        if (extends) {
            baseFns = effective_interface(m_, *b.base).size();
            baseParts = effective_parts(m_, *b.base).size();
            w.line("SUPER^();");
        } else {
            composite_body(w, b, l, true);
            method(w, "drive", false, {}, [&](Writer& mw) { drive_loop(mw, b, l, true); });
        }
        if (!extends || l.iface.size() > baseFns) {
            method(w, "pick", extends, {{Section::Input, "k", "INT", "0", ""}},
                   [&](Writer& mw) { pick_stmts(mw, b, l, "k", baseFns, extends); });
        }
        std::vector<std::size_t> own;  // interface positions whose definition lives here
        for (std::size_t i = 0; i < l.iface.size(); ++i) {
            if (b.find_function(l.iface[i].function.name)) own.push_back(i);
        }
        if (!extends || l.iface.size() > baseFns) {
            method(w, "dispatch", extends, {{Section::Input, "op", "INT", "0", ""}, {Section::Input, "f", "INT", "0", ""}},
                   [&](Writer& mw) {
                       if (l.iface.size() == baseFns) return;
                       mw.line("CASE f OF");
                       mw.in();
                       for (std::size_t i = baseFns; i < l.iface.size(); ++i) {
                           const FnNames& fn = names(b.name).fns.at(l.iface[i].function.name);
                           mw.line(std::to_string(i + 1) + ": THIS^." + fn.method + "(op := op);");
                       }
                       mw.out_();
                       if (extends) {
                           mw.line("ELSE");
                           mw.in();
                           mw.line("SUPER^.dispatch(op := op, f := f);");
                           mw.out_();
                       }
                       mw.line("END_CASE;");
                   });
        }
        for (std::size_t i : own) {
            const FunctionDef& def = *b.find_function(l.iface[i].function.name);
            const FnNames& fn = names(b.name).fns.at(def.name);
            bool overrides = extends && i < baseFns;
            method(w, fn.method, overrides, {{Section::Input, "op", "INT", "0", ""}},
                   [&](Writer& mw) { function_ops(mw, b, def, "op"); });
        }
        bool newComposites = std::any_of(l.parts.begin() + static_cast<std::ptrdiff_t>(baseParts), l.parts.end(),
                                         [&](const PartDef& p) { return composite_part(p); });
        if (!extends || newComposites) {
            method(w, "route", extends, {}, [&](Writer& mw) { route_stmts(mw, b, l, baseParts, extends); });
        }
        if (!extends || newComposites || l.iface.size() > baseFns) {
            method(w, "phase_parts", extends, {},
                   [&](Writer& mw) { phase_parts_stmts(mw, b, l, baseFns, baseParts, extends); });
        }
        if (!extends || l.iface.size() > baseFns) {
            method(w, "query", extends, {}, [&](Writer& mw) { query_stmts(mw, b, l, baseFns, extends); });
            method(w, "sync", extends, {}, [&](Writer& mw) {
                if (extends) mw.line("SUPER^.sync();");
                sync_stmts(mw, b, l, baseFns);
            });
        }
        method(w, "init", extends, {}, [&](Writer& mw) {
            if (extends) mw.line("SUPER^.init();");
            initial_overrides(mw, b);
            const BlockNames& n = names(b.name);
            for (std::size_t i = baseParts; i < l.parts.size(); ++i) {
                const std::string& st = n.parts.at(l.parts[i].name);
                if (composite_part(l.parts[i])) {
                    mw.line(st + "(cmd := " + cmd(StCommand::Init) + ", fn := 0, sel := 0, cycle := 0);");
                } else {
                    mw.line(st + "(cmd := " + cmd(StCommand::Init) + ");");
                }
            }
        });
    }

    // --- program -----------------------------------------------------------

    void collect_symbols(const ObjectInstance& inst, const std::string& stPath, STUnit& unit,
                         std::vector<std::string>& io) {
        const BlockNames& n = names(inst.block);
        auto attrs = effective_attributes(m_, inst.block);
        for (const auto& [attr, value] : inst.variables) {
            std::string st = stPath + "." + n.attrs.at(attr);
            unit.symbols.emplace_back(inst.path + "." + attr, st);
            for (const auto& a : attrs) {
                if (a.name == attr && a.io != IoDirection::None) {
                    io.push_back(std::string(a.io == IoDirection::Input ? "%I* " : "%Q* ") + st + " : " +
                                 st_type(a.type));
                }
            }
        }
        for (const auto& child : inst.children) {
            std::string part = child.path.substr(inst.path.size() + 1);
            collect_symbols(child, stPath + "." + n.parts.at(part), unit, io);
        }
    }

    std::string emit_main(STUnit& unit) {
        NameMangler scope(reserved(false));
        for (const char* s : {"entryFn", "entrySel", "finished", "started"}) scope(s);
        std::string root = scope(m_.root.instance);
        std::string rootFb = fb_name(m_.root.block);

        Writer w;
        w.line("PROGRAM Main");
        std::vector<Decl> decls;
        decls.push_back({Section::Input, "entryFn", "INT", "0", ""});
        decls.push_back({Section::Input, "entrySel", "DINT", "0", ""});
        for (const auto& [s, t] : all_slots('a')) decls.push_back({Section::Input, s, st_type(t), st_literal(Value::zero(t)), ""});
        decls.push_back({Section::Output, "finished", "BOOL", "FALSE", ""});
        decls.push_back({Section::Local, root, rootFb, "", ""});
        decls.push_back({Section::Local, "cycle", "DINT", "0", ""});
        decls.push_back({Section::Local, "started", "BOOL", "FALSE", ""});
        sections(w, decls);

        w.line("IF NOT started THEN");
        w.in();
        if (opt_.oop) w.line(root + "(cmd := " + cmd(StCommand::Init) + ", fn := 0, sel := 0, cycle := cycle);");
        w.line(root + "(cmd := " + cmd(StCommand::Bind) + ", fn := entryFn, sel := entrySel, cycle := cycle" +
               forward_args() + ");");
        w.line("started := TRUE;");
        w.out_();
        w.line("END_IF;");
        w.line("IF NOT " + root + ".rDone THEN");
        w.in();
        w.line(root + "(cmd := " + cmd(StCommand::Step) + ", fn := entryFn, sel := entrySel, cycle := cycle);");
        w.out_();
        w.line("END_IF;");
        w.line(root + "(cmd := " + cmd(StCommand::Phase) + ", fn := 0, sel := 0, cycle := cycle);");
        w.line(root + "(cmd := " + cmd(StCommand::Query) + ", fn := entryFn, sel := entrySel, cycle := cycle);");
        w.line("finished := " + root + ".rDone AND NOT " + root + ".rDetached;");
        w.line("cycle := cycle + 1;");

        std::vector<std::string> io;
        ObjectInstance tree = instantiate(m_, m_.root.block, m_.root.instance);
        collect_symbols(tree, root, unit, io);
        w.line("");
        w.line("(* I/O wiring: bind each signal to a hardware address *)");
        for (const auto& s : io) w.line("(*   " + s + " *)");
        w.line("END_PROGRAM");
        return w.out;
    }

    static constexpr long kDefaultCycle = 10;

    const Model& m_;
    CodegenOptions opt_;
    std::map<std::string, BlockNames> names_;
    std::map<std::string, std::string> fbNames_;
    NameMangler pouScope_{st_keywords()};
    std::map<TypeTag, int> slots_;
};

}  // namespace

std::string mangle_name(std::string_view name) {
    std::string out;
    for (char ch : name) {
        char c = ch == '.' ? '_' : ch;
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) c = '_';
        if (c == '_' && (out.empty() || out.back() == '_')) continue;
        out += c;
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    if (out.empty()) out = "x";
    if (std::isdigit(static_cast<unsigned char>(out[0]))) out = "n" + out;
    return out;
}

NameMangler::NameMangler(const std::set<std::string>& reserved) {
    for (const auto& r : reserved) used_.insert(upper(r));
}

std::string NameMangler::operator()(std::string_view name) {
    std::string base = mangle_name(name);
    std::string candidate = base;
    for (int i = 1; used_.count(upper(candidate)); ++i) candidate = base + "_" + std::to_string(i);
    used_.insert(upper(candidate));
    return candidate;
}

std::string STUnit::text() const {
    std::string out = "(* Generated by modat-lc " + std::string(kToolVersion) + " (" + std::string(kGrammarVersion) +
                      "), " + (options.oop ? "EXTENDS/METHOD" : "flattened") + " emission *)\n";
    for (const auto& p : pous) out += "\n" + p.text;
    return out;
}

InvalidModel::InvalidModel(Diagnostics d)
    : std::runtime_error("model has validation errors; code generation needs a valid model"), diags_(std::move(d)) {}

STUnit generate_st(const Model& model, const CodegenOptions& options) {
    Diagnostics d = validate(model, ValidateOptions{options.allowDeepInheritance});
    if (has_errors(d)) throw InvalidModel(std::move(d));
    return Generator(model, options).run();
}

StEntry st_entry(const Model& model, const Invocation& invocation) {
    StEntry e;
    ObjectInstance tree = instantiate(model, model.root.block, model.root.instance);
    int counter = 0;
    std::string block;
    std::function<void(const ObjectInstance&)> walk = [&](const ObjectInstance& inst) {
        if (inst.path == invocation.instancePath) {
            e.entrySel = counter;
            block = inst.block;
        }
        ++counter;
        for (const auto& c : inst.children) walk(c);
    };
    walk(tree);
    auto iface = effective_interface(model, block);
    for (std::size_t i = 0; i < iface.size(); ++i) {
        if (iface[i].function.name != invocation.function) continue;
        e.entryFn = static_cast<int>(i) + 1;
        std::map<TypeTag, int> seen;
        const auto& params = iface[i].function.params;
        for (std::size_t k = 0; k < params.size() && k < invocation.args.size(); ++k) {
            int n = ++seen[params[k].type];
            e.slots.emplace_back(std::string("a") + slot_letter(params[k].type) + std::to_string(n), invocation.args[k]);
        }
    }
    return e;
}

}  // namespace modat
