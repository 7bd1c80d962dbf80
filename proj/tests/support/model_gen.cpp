#include "model_gen.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "modat/model_ops.hpp"
#include "modat/validator.hpp"

namespace testgen {

namespace {

using namespace modat;

struct GAttr {
    std::string name;
    TypeTag type;
};

struct GFunc {
    std::string name;
    std::vector<Param> params;
};

struct GBlock {
    std::string name;
    bool component = false;
    TypeTag signalType = TypeTag::Bool;
    bool input = false;
    std::vector<std::pair<std::string, std::string>> parts;  // effective
    std::vector<GAttr> attrs;                                // effective
    std::vector<GFunc> funcs;                                // effective, interface order
};

struct Operand {
    std::string text;
    std::string lane;  // empty for literals and parameters
};

class Generator {
public:
    Generator(std::uint64_t seed, const GenConfig& config) : rng_(seed), cfg_(config) {}

    std::string run() {
        if (chance(0.5)) {
            out_ << "system function delay(duration: TIME)\n";
            hasDelay_ = true;
        }
        if (chance(0.5)) {
            out_ << "system function waitCycles(count: INT)\n";
            hasWait_ = true;
        }
        for (int i = 0; i < std::max(1, cfg_.components); ++i) component(i);
        for (int i = 0; i < std::max(1, cfg_.composites); ++i) family(i);

        std::vector<const GBlock*> roots;
        for (const auto& b : blocks_) {
            if (!b.component && b.name.rfind("K" + std::to_string(cfg_.composites - 1), 0) == 0) {
                roots.push_back(&b);
            }
        }
        out_ << "\nroot top: " << pick(roots)->name << "\n";
        return out_.str();
    }

private:
    int uni(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uni(0, static_cast<int>(v.size()) - 1))];
    }

    TypeTag data_type() {
        int r = uni(0, 7);
        return r < 3 ? TypeTag::Bool : r < 7 ? TypeTag::Int : TypeTag::Real;
    }

    std::string literal(TypeTag t) {
        switch (t) {
            case TypeTag::Bool: return chance(0.5) ? "TRUE" : "FALSE";
            case TypeTag::Int: return std::to_string(uni(-3, 40));
            case TypeTag::Real: return format_literal(Value::real(uni(0, 40) / 4.0));
            case TypeTag::Time: return "T#" + std::to_string(10 * uni(1, 5)) + "ms";
        }
        return "FALSE";
    }

    void component(int i) {
        GBlock b;
        b.name = "C" + std::to_string(i);
        b.component = true;
        b.signalType = data_type();
        b.input = chance(0.5);
        out_ << "\nblock " << b.name << " kind component " << (b.input ? "input " : "output ")
             << to_string(b.signalType) << " = " << literal(b.signalType) << " { }\n";
        blocks_.push_back(b);
    }

    const GBlock* block(const std::string& name) const {
        for (const auto& b : blocks_) {
            if (b.name == name) return &b;
        }
        return nullptr;
    }

    std::vector<Param> params() {
        std::vector<Param> ps;
        int n = uni(0, 2);
        for (int i = 0; i < n; ++i) ps.push_back({"x" + std::to_string(i), data_type()});
        return ps;
    }

    static std::string signature(const GFunc& f) {
        std::string s = f.name + "(";
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            if (i) s += ", ";
            s += f.params[i].name + ": " + std::string(to_string(f.params[i].type));
        }
        return s + ")";
    }

    // --- one composite family: a base block and its variants -------------------

    struct Family {
        int parts = 0;
        int attrs = 0;
        int funcs = 0;
        std::set<std::string> selfCalled;
    };

    void family(int i) {
        Family fam;
        GBlock base;
        base.name = "K" + std::to_string(i);
        std::vector<std::string> pool;
        for (const auto& b : blocks_) pool.push_back(b.name);

        std::ostringstream body;
        int minParts = i == cfg_.composites - 1 ? 1 : 0;
        for (int p = uni(minParts, std::max(minParts, cfg_.maxParts)); p > 0; --p) add_part(base, fam, pool, body);
        for (int a = uni(1, std::max(1, cfg_.maxAttrs)); a > 0; --a) add_attr(base, fam, body);
        std::vector<GFunc> own;
        for (int f = uni(1, std::max(1, cfg_.maxFunctions)); f > 0; --f) {
            own.push_back({"f" + std::to_string(fam.funcs++), params()});
        }
        base.funcs = own;
        for (std::size_t f = 0; f < own.size(); ++f) {
            body << "    function " << signature(own[f]) << behavior(base, own[f], f, fam) << "\n";
        }
        out_ << "\nblock " << base.name << " kind composite {\n" << body.str() << "}\n";
        blocks_.push_back(base);

        int variants = uni(0, cfg_.maxVariants);
        for (int v = 0; v < variants; ++v) {
            GBlock var = base;
            var.name = base.name + "V" + std::to_string(v);
            std::ostringstream vb;
            bool adds = chance(cfg_.variantAddProbability);
            if (adds) {
                for (int p = uni(0, 2); p > 0; --p) add_part(var, fam, pool, vb);
                for (int a = uni(0, 2); a > 0; --a) add_attr(var, fam, vb);
            }
            for (const auto& a : base.attrs) {
                if (chance(0.3)) vb << "    attr " << a.name << ": " << to_string(a.type) << " = " << literal(a.type) << "\n";
            }
            std::vector<std::size_t> overridden;
            for (std::size_t f = 0; f < var.funcs.size(); ++f) {
                if (!chance(0.4)) continue;
                if (!fam.selfCalled.count(var.funcs[f].name) && chance(0.3)) var.funcs[f].params = params();
                overridden.push_back(f);
            }
            std::size_t firstNew = var.funcs.size();
            if (adds) {
                for (int f = uni(0, 2); f > 0; --f) var.funcs.push_back({"f" + std::to_string(fam.funcs++), params()});
            }
            for (std::size_t f : overridden) {
                vb << "    override function " << signature(var.funcs[f]) << behavior(var, var.funcs[f], f, fam) << "\n";
            }
            for (std::size_t f = firstNew; f < var.funcs.size(); ++f) {
                vb << "    function " << signature(var.funcs[f]) << behavior(var, var.funcs[f], f, fam) << "\n";
            }
            out_ << "\nvariant " << var.name << " of " << base.name << " {\n" << vb.str() << "}\n";
            blocks_.push_back(var);
        }
    }

    void add_part(GBlock& b, Family& fam, const std::vector<std::string>& pool, std::ostream& os) {
        if (pool.empty()) return;
        std::string name = "p" + std::to_string(fam.parts++);
        std::string type = pick(pool);
        b.parts.emplace_back(name, type);
        os << "    part " << name << ": " << type << "\n";
    }

    void add_attr(GBlock& b, Family& fam, std::ostream& os) {
        GAttr a{"a" + std::to_string(fam.attrs++), data_type()};
        b.attrs.push_back(a);
        os << "    attr " << a.name << ": " << to_string(a.type) << " = " << literal(a.type) << "\n";
    }

    // --- behaviors ------------------------------------------------------------

    struct Ctx {
        const GBlock& host;
        const GFunc& fn;
        std::size_t index;  // position in the host's interface
        std::set<std::string> lanes;
    };

    std::vector<Operand> readable(const Ctx& c, TypeTag t) const {
        std::vector<Operand> ops;
        for (const auto& p : c.fn.params) {
            if (p.type == t) ops.push_back({p.name, ""});
        }
        for (const auto& a : c.host.attrs) {
            if (a.type == t) ops.push_back({"self." + a.name, "self"});
        }
        for (const auto& [pname, ptype] : c.host.parts) {
            const GBlock* pb = block(ptype);
            if (pb->component) {
                if (pb->signalType == t) ops.push_back({pname + ".Signal", pname});
            } else {
                for (const auto& a : pb->attrs) {
                    if (a.type == t) ops.push_back({pname + "." + a.name, pname});
                }
            }
        }
        return ops;
    }

    std::string operand(Ctx& c, TypeTag t, double literalBias) {
        auto ops = readable(c, t);
        if (ops.empty() || chance(literalBias)) return literal(t);
        const Operand& o = pick(ops);
        if (!o.lane.empty()) c.lanes.insert(o.lane);
        return o.text;
    }

    std::string value(Ctx& c, TypeTag t, int depth) {
        if (depth <= 0 || chance(0.4)) return operand(c, t, 0.4);
        switch (t) {
            case TypeTag::Bool: {
                int r = uni(0, 3);
                if (r == 0) return "not " + paren(value(c, TypeTag::Bool, depth - 1));
                if (r == 1) {
                    return paren(value(c, TypeTag::Bool, depth - 1)) + (chance(0.5) ? " and " : " or ") +
                           paren(value(c, TypeTag::Bool, depth - 1));
                }
                TypeTag x = data_type();
                const char* op = x == TypeTag::Bool ? (chance(0.5) ? " == " : " != ")
                                                    : pick(std::vector<const char*>{" < ", " <= ", " > ", " >= ", " == ", " != "});
                return operand(c, x, 0.2) + op + operand(c, x, 0.5);
            }
            case TypeTag::Int: {
                int r = uni(0, 3);
                if (r == 0) return operand(c, t, 0.2) + " * " + std::to_string(uni(0, 3));
                if (r == 1) return "-" + paren(operand(c, t, 0.0));
                return paren(value(c, t, depth - 1)) + (chance(0.5) ? " + " : " - ") + operand(c, t, 0.3);
            }
            case TypeTag::Real:
                return operand(c, t, 0.2) + (chance(0.5) ? " + " : " - ") + literal(t);
            case TypeTag::Time: return literal(t);
        }
        return literal(t);
    }

    static std::string paren(const std::string& s) { return "(" + s + ")"; }

    std::string cond_operand(Ctx& c, TypeTag t, double literalBias) {
        return operand(c, t, literalBias);
    }

    std::string condition(Ctx& c, int depth) {
        int r = depth > 0 ? uni(0, 5) : uni(2, 5);
        if (r == 0) return "not (" + condition(c, depth - 1) + ")";
        if (r == 1) return "(" + condition(c, depth - 1) + ")" + (chance(0.5) ? " and (" : " or (") + condition(c, depth - 1) + ")";
        if (r == 2) {
            auto ops = readable(c, TypeTag::Bool);
            if (!ops.empty()) return cond_operand(c, TypeTag::Bool, 0.0);
        }
        TypeTag x = data_type();
        const char* op = x == TypeTag::Bool ? (chance(0.5) ? " == " : " != ")
                                            : pick(std::vector<const char*>{" < ", " <= ", " > ", " >= ", " == ", " != "});
        return cond_operand(c, x, 0.0) + op + cond_operand(c, x, 0.6);
    }

    std::string assignments(Ctx& c, int n) {
        std::string s;
        for (int i = 0; i < n; ++i) {
            const GAttr& a = pick(c.host.attrs);
            if (i) s += ", ";
            s += "self." + a.name + " := " + value(c, a.type, 2);
        }
        c.lanes.insert("self");
        return s;
    }

    std::string args(Ctx& c, const std::vector<Param>& ps) {
        std::string s = "(";
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i) s += ", ";
            s += value(c, ps[i].type, 1);
        }
        return s + ")";
    }

    // Returns the action text; `isCall` tells whether a policy is allowed.
    std::string action(Ctx& c, Family& fam, bool& isCall) {
        std::vector<std::function<std::string()>> kinds;
        if (!c.host.attrs.empty()) {
            kinds.push_back([&] { isCall = false; return "set " + assignments(c, uni(1, 2)); });
        }
        for (const auto& [pname, ptype] : c.host.parts) {
            const GBlock* pb = block(ptype);
            std::string lane = pname;
            if (pb->component) {
                kinds.push_back([&c, this, pb, lane, &isCall] {
                    isCall = true;
                    c.lanes.insert(lane);
                    if (!pb->input && chance(0.7)) {
                        return "call " + lane + ".setSignal(" + value(c, pb->signalType, 1) + ")";
                    }
                    return "call " + lane + ".getSignal()";
                });
            } else if (!pb->funcs.empty()) {
                for (int w = 0; w < 2; ++w) {  // composite calls are the interesting ones
                    kinds.push_back([&c, this, pb, lane, &isCall] {
                        isCall = true;
                        c.lanes.insert(lane);
                        const GFunc& f = pick(pb->funcs);
                        return "call " + lane + "." + f.name + args(c, f.params);
                    });
                }
            }
        }
        if (hasDelay_) {
            kinds.push_back([&] {
                isCall = true;
                c.lanes.insert("system");
                return "call system.delay(" + literal(TypeTag::Time) + ")";
            });
        }
        if (hasWait_) {
            kinds.push_back([&] {
                isCall = true;
                c.lanes.insert("system");
                return "call system.waitCycles(" + std::to_string(uni(1, 3)) + ")";
            });
        }
        if (c.index > 0 && chance(0.3)) {
            kinds.push_back([&] {
                isCall = true;
                c.lanes.insert("self");
                const GFunc& f = c.host.funcs[static_cast<std::size_t>(uni(0, static_cast<int>(c.index) - 1))];
                fam.selfCalled.insert(f.name);
                return "call self." + f.name + args(c, f.params);
            });
        }
        return pick(kinds)();
    }

    std::string behavior(const GBlock& host, const GFunc& fn, std::size_t index, Family& fam) {
        Ctx c{host, fn, index, {}};
        int k = uni(1, std::max(1, cfg_.maxNodes));
        std::vector<std::string> nodes;
        std::vector<bool> calls;
        std::ostringstream ns;
        for (int i = 0; i < k; ++i) {
            std::string id = "n" + std::to_string(i);
            bool isCall = false;
            std::string act = action(c, fam, isCall);
            ns << "        node " << id << ": " << act;
            if (!host.attrs.empty() && chance(0.2)) ns << "\n            entry " << assignments(c, 1);
            if (!host.attrs.empty() && chance(0.2)) ns << "\n            exit " << assignments(c, 1);
            ns << "\n";
            nodes.push_back(id);
            calls.push_back(isCall);
        }

        auto op = [&]() -> std::string {
            if (host.attrs.empty() || !chance(0.2)) return "";
            return " then " + assignments(c, 1);
        };
        std::ostringstream ts;
        ts << "        start -> n0\n";
        for (int i = 0; i < k; ++i) {
            std::string next = i + 1 < k ? nodes[static_cast<std::size_t>(i + 1)] : "end";
            std::string main = chance(0.65) ? " on completion" : " when " + condition(c, 1);
            std::string mainLine = "        " + nodes[static_cast<std::size_t>(i)] + " -> " + next + main + op() + "\n";
            std::string extra;
            if (chance(0.35)) {
                std::string target = chance(0.3) ? "end" : pick(nodes);
                extra = "        " + nodes[static_cast<std::size_t>(i)] + " -> " + target + " when " + condition(c, 1);
                if (calls[static_cast<std::size_t>(i)] && chance(0.7)) {
                    extra += " policy " + pick(std::vector<std::string>{"resume", "restart", "continue"});
                }
                extra += op() + "\n";
            }
            if (chance(0.5)) {
                ts << extra << mainLine;
            } else {
                ts << mainLine << extra;
            }
        }

        std::vector<std::string> lanes;
        if (c.lanes.count("self") || (!host.attrs.empty() && chance(0.1))) lanes.push_back("self");
        for (const auto& [pname, ptype] : host.parts) {
            if (c.lanes.count(pname) || chance(0.1)) lanes.push_back(pname);
        }
        if (c.lanes.count("system")) lanes.push_back("system");

        std::ostringstream os;
        os << " {\n        lanes ";
        for (std::size_t i = 0; i < lanes.size(); ++i) os << (i ? ", " : "") << lanes[i];
        os << "\n" << ns.str() << ts.str() << "    }";
        return os.str();
    }

    std::mt19937_64 rng_;
    GenConfig cfg_;
    std::ostringstream out_;
    std::vector<GBlock> blocks_;
    bool hasDelay_ = false;
    bool hasWait_ = false;
};

}  // namespace

std::string random_model_text(std::uint64_t seed, const GenConfig& config) {
    return "// modat v1\n" + Generator(seed, config).run();
}

modat::Model random_model(std::uint64_t seed, const GenConfig& config) {
    std::string text = random_model_text(seed, config);
    auto parsed = modat::parse_model(text, "gen" + std::to_string(seed) + ".modat");
    modat::Diagnostics diags = parsed.diagnostics;
    if (parsed.model && !modat::has_errors(diags)) {
        auto v = modat::validate(*parsed.model);
        diags.insert(diags.end(), v.begin(), v.end());
    }
    if (!parsed.model || !diags.empty()) {
        std::string msg = "generated model (seed " + std::to_string(seed) + ") is not clean:\n";
        for (const auto& d : diags) msg += modat::render_diagnostic(d) + "\n";
        throw GenError(msg + text);
    }
    return std::move(*parsed.model);
}

modat::Scenario random_scenario(const modat::Model& model, std::uint64_t seed, int maxCycles) {
    using namespace modat;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto lit = [&](TypeTag t) {
        switch (t) {
            case TypeTag::Bool: return Value::boolean(uni(0, 1) == 1);
            case TypeTag::Int: return Value::integer(uni(-3, 40));
            case TypeTag::Real: return Value::real(uni(0, 40) / 4.0);
            case TypeTag::Time: return Value::time(Duration{10 * uni(1, 5)});
        }
        return Value{};
    };

    Scenario sc;
    sc.maxCycles = maxCycles;
    auto iface = effective_interface(model, model.root.block);
    const FunctionDef& fn = iface[static_cast<std::size_t>(uni(0, static_cast<int>(iface.size()) - 1))].function;
    sc.invocation.instancePath = model.root.instance;
    sc.invocation.function = fn.name;
    for (const auto& p : fn.params) sc.invocation.args.push_back(lit(p.type));

    std::function<void(const ObjectInstance&)> walk = [&](const ObjectInstance& obj) {
        auto attrs = effective_attributes(model, obj.block);
        const AttributeDef* sig = find_signal(attrs);
        const BlockDef* b = model.find_block(obj.block);
        if (b->kind == BlockKind::Component && sig && sig->io == IoDirection::Input) {
            for (int n = uni(0, 4); n > 0; --n) {
                sc.inputs.push_back({uni(0, std::max(0, maxCycles - 1)), obj.path, lit(sig->type), {}});
            }
        }
        for (const auto& ch : obj.children) walk(ch);
    };
    walk(instantiate(model, model.root.block, model.root.instance));
    std::stable_sort(sc.inputs.begin(), sc.inputs.end(),
                     [](const InputEvent& a, const InputEvent& b) { return a.cycle < b.cycle; });
    return sc;
}

std::string mutate_text(const std::string& text, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    static const std::vector<std::string> tokens{
        "block", "variant", "of", "kind", "component", "composite", "part", "attr", "function", "override",
        "lanes", "node", "call", "set", "entry", "exit", "start", "end", "->", "on completion", "when",
        "policy", "resume", "then", ":=", "==", "{", "}", "(", ")", ":", ",", ".", "root", "system",
        "INT", "BOOL", "REAL", "TIME", "T#", "1e999", "-", "0x", "\"", "//", "/*", "\n", "\t", std::string(1, '\0'), "\xff"};
    std::string s = text;
    int edits = static_cast<int>(uni(1, 6));
    for (int e = 0; e < edits; ++e) {
        std::size_t pos = s.empty() ? 0 : uni(0, s.size() - 1);
        switch (uni(0, 7)) {
            case 0:  // flip a byte
                if (!s.empty()) s[pos] = static_cast<char>(uni(0, 255));
                break;
            case 1:  // delete a span
                if (!s.empty()) s.erase(pos, uni(1, 40));
                break;
            case 2:  // insert a token
                s.insert(pos, tokens[uni(0, tokens.size() - 1)]);
                break;
            case 3:  // duplicate a span
                if (!s.empty()) s.insert(pos, s.substr(uni(0, s.size() - 1), uni(1, 60)));
                break;
            case 4:  // truncate
                s.resize(pos);
                break;
            case 5: {  // random bytes
                std::string junk;
                for (std::size_t i = uni(1, 16); i > 0; --i) junk.push_back(static_cast<char>(uni(0, 255)));
                s.insert(pos, junk);
                break;
            }
            case 6:  // swap two bytes
                if (s.size() > 2) {
                    std::size_t a = uni(0, s.size() - 1), b = uni(0, s.size() - 1);
                    std::swap(s[a], s[b]);
                }
                break;
            default:  // digit run
                s.insert(pos, std::string(uni(1, 25), '9'));
                break;
        }
    }
    return s;
}

}  // namespace testgen
