#include <gtest/gtest.h>

#include <climits>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <utility>

#include "corpus.hpp"
#include "model_gen.hpp"
#include "scan_oracles.hpp"
#include "modat/model_ops.hpp"
#include "modat/simulator.hpp"

using namespace modat;

namespace {

Model load(const std::string& name) {
    return testcorpus::load_model(name == "stamp" ? testcorpus::root() / "stamp.modat"
                                                  : testcorpus::root() / "models" / (name + ".modat"));
}

Scenario scenario(const Model& m, const std::string& file) {
    return testcorpus::load_scenario(file == "extend40" ? testcorpus::root() / "extend40.scn"
                                                        : testcorpus::root() / "scenarios" / (file + ".scn"),
                                     m);
}

std::vector<std::string> fired(const CycleRecord& r) {
    std::vector<std::string> out;
    for (const auto& f : r.fired) out.push_back(f.instance + ":" + f.from + "->" + f.to);
    return out;
}

Value var(const CycleRecord& r, const std::string& name) {
    for (const auto& [n, v] : r.vars) {
        if (n == name) return v;
    }
    ADD_FAILURE() << "no variable " << name;
    return {};
}

std::vector<InputLatch> latches_at(const Scenario& sc, int cycle) {
    std::vector<InputLatch> out;
    for (const auto& in : sc.inputs) {
        if (in.cycle == cycle) out.push_back({in.instancePath, in.value});
    }
    return out;
}

using scanoracle::Step;
using scanoracle::stepped_run;

struct Topo {
    std::map<std::string, std::string> blockOf;  // object path -> block

    explicit Topo(const Model& m) {
        std::function<void(const ObjectInstance&)> walk = [&](const ObjectInstance& o) {
            blockOf[o.path] = o.block;
            for (const auto& c : o.children) walk(c);
        };
        walk(instantiate(m, m.root.block, m.root.instance));
    }
};

std::pair<std::string, std::string> split_key(const std::string& key) {
    auto dot = key.rfind('.');
    return {key.substr(0, dot), key.substr(dot + 1)};
}

}  // namespace

// --- init_run -----------------------------------------------------------------

TEST(InitRun, RootInstanceIsFresh) {
    Model m = load("stamp");
    Invocation inv{"stamp.stampCylinder", "extend", {Value::integer(40)}, {}};
    ScanState s = init_run(m, inv);
    EXPECT_EQ(s.root, (InstanceKey{"stamp.stampCylinder", "extend"}));
    ASSERT_NE(s.instance(s.root), nullptr);
    EXPECT_EQ(s.instance(s.root)->status, InstanceStatus::Fresh);
    EXPECT_EQ(s.cycle, 0);
    EXPECT_EQ(s.value_of("stamp.stampCylinder.valveExtend.Signal"), Value::boolean(false));
    EXPECT_EQ(s.value_of("stamp.stampCylinder.strokes"), Value::integer(0));
}

TEST(InitRun, ArityAndTargetErrors) {
    Model m = load("stamp");
    try {
        init_run(m, Invocation{"stamp.stampCylinder", "extend", {}, {}});
        FAIL() << "no error";
    } catch (const SimulationError& e) {
        EXPECT_EQ(e.code(), SimErrorCode::ArityMismatch);
    }
    try {
        init_run(m, Invocation{"stamp.nothing", "extend", {}, {}});
        FAIL() << "no error";
    } catch (const SimulationError& e) {
        EXPECT_EQ(e.code(), SimErrorCode::UnknownTarget);
    }
    try {
        init_run(m, Invocation{"stamp.stampCylinder", "extend", {Value::boolean(true)}, {}});
        FAIL() << "no error";
    } catch (const SimulationError& e) {
        EXPECT_EQ(e.code(), SimErrorCode::TypeMismatch);
    }
}

// --- hand-traced tables ---------------------------------------------------------

namespace {

const scanoracle::HandTrace& hand_trace(const std::string& name) {
    for (const auto& h : scanoracle::hand_traces()) {
        if (h.name == name) return h;
    }
    throw std::logic_error("no hand trace " + name);
}

void expect_hand_trace(const std::string& name) {
    const auto& h = hand_trace(name);
    Model m = testcorpus::load_model(testcorpus::root() / h.model);
    Trace t = run(m, testcorpus::load_scenario(testcorpus::root() / h.scenario, m));
    EXPECT_EQ(scanoracle::table_mismatch(t, h.rows), "");
    EXPECT_EQ(t.completed, h.completes);
    EXPECT_TRUE(t.ok());
}

}  // namespace

TEST(HandTraced, PressureRampAgainstTargetPressure) { expect_hand_trace("ramp"); }

TEST(HandTraced, ResumeContinuesAtThePausedNode) { expect_hand_trace("resume"); }

TEST(HandTraced, RestartBeginsAgainAtStart) { expect_hand_trace("restart"); }

TEST(HandTraced, ContinueKeepsTheCalleeRunningDetached) { expect_hand_trace("continue"); }

TEST(HandTraced, MissingPolicyMeansRestart) {
    Model m = load("policies");
    Trace restart = run(m, scenario(m, "policies_restart"));
    Trace fallback = run(m, scenario(m, "policies_default"));
    ASSERT_EQ(restart.cycles.size(), fallback.cycles.size());
    for (std::size_t i = 0; i < restart.cycles.size(); ++i) {
        EXPECT_EQ(restart.cycles[i].vars, fallback.cycles[i].vars) << "cycle " << i;
    }
}

TEST(HandTraced, SingleSetNodeCompletesInTheSecondCycle) {
    auto parsed = parse_model(
        "block A kind composite {\n    attr x: INT = 0\n    function f() {\n        lanes self\n"
        "        node n: set self.x := self.x + 1\n        start -> n\n        n -> end on completion\n    }\n}\n"
        "root a: A\n");
    ASSERT_TRUE(parsed.model.has_value());
    Scenario sc;
    sc.invocation = {"a", "f", {}, {}};
    sc.maxCycles = 10;
    Trace t = run(*parsed.model, sc);
    ASSERT_EQ(t.cycles.size(), 2u);
    EXPECT_EQ(fired(t.cycles[0]), (std::vector<std::string>{"a.f:start->n"}));
    EXPECT_EQ(fired(t.cycles[1]), (std::vector<std::string>{"a.f:n->end"}));
    EXPECT_EQ(var(t.cycles[1], "a.x"), Value::integer(1));
    EXPECT_TRUE(t.completed);
}

// --- run ------------------------------------------------------------------------

TEST(Run, ZeroCyclesDiverges) {
    Model m = load("stamp");
    Scenario sc = scenario(m, "extend40");
    sc.assertions.clear();
    sc.maxCycles = 0;
    Trace t = run(m, sc);
    EXPECT_TRUE(t.cycles.empty());
    EXPECT_TRUE(t.diverged);
    EXPECT_FALSE(t.ok());
}

TEST(Run, ReplayIsByteIdentical) {
    for (const auto& cm : testcorpus::models()) {
        Model m = testcorpus::load_model(cm.model);
        for (const auto& p : cm.scenarios) {
            Scenario sc = testcorpus::load_scenario(p, m);
            EXPECT_EQ(trace_to_jsonl(run(m, sc)), trace_to_jsonl(run(m, sc))) << p;
        }
    }
}

TEST(Run, CorpusScenarioOutcomes) {
    const std::set<std::string> diverging{"crossing_stuck", "sorting_jam", "press_weak"};
    int scenarios = 0;
    for (const auto& cm : testcorpus::models()) {
        Model m = testcorpus::load_model(cm.model);
        for (const auto& p : cm.scenarios) {
            ++scenarios;
            Trace t = run(m, testcorpus::load_scenario(p, m));
            std::string name = p.stem().string();
            if (diverging.count(name)) {
                EXPECT_TRUE(t.diverged) << name;
                EXPECT_FALSE(t.completed) << name;
            } else {
                EXPECT_TRUE(t.ok()) << name;
                EXPECT_TRUE(t.completed) << name;
                EXPECT_EQ(t.passed(), static_cast<int>(t.assertions.size())) << name;
            }
        }
    }
    EXPECT_EQ(scenarios, 32);
}

TEST(Run, UnreachedAssertionFails) {
    Model m = load("stamp");
    Scenario sc = scenario(m, "extend40");
    auto extra = sc.assertions.back();
    extra.cycle = 15;
    sc.assertions.push_back(extra);
    Trace t = run(m, sc);
    EXPECT_TRUE(t.completed);
    ASSERT_EQ(t.assertions.size(), 4u);
    EXPECT_FALSE(t.assertions.back().reached);
    EXPECT_FALSE(t.assertions.back().passed);
    EXPECT_FALSE(t.ok());
}

TEST(StepCycle, PureFormLeavesItsInputUntouched) {
    Model m = load("stamp");
    Scenario sc = scenario(m, "stamp_workpiece");
    ScanState s = init_run(m, sc.invocation);
    ScanState inPlace = s;
    for (int c = 0; c < 12; ++c) {
        ScanState before = s;
        auto [next, rec] = step_cycle(std::as_const(s), latches_at(sc, c));
        CycleRecord direct = step_cycle(inPlace, latches_at(sc, c));
        EXPECT_EQ(s.values, before.values);
        EXPECT_EQ(s.cycle, before.cycle);
        EXPECT_EQ(rec.vars, direct.vars);
        EXPECT_EQ(rec.fired, direct.fired);
        s = next;
    }
}

// --- evaluation -------------------------------------------------------------------

TEST(EvalCondition, ThresholdExamples) {
    Model m = load("stamp");
    ScanState s = init_run(m, Invocation{"stamp.stampCylinder", "extend", {Value::integer(40)}, {}});
    auto names = s.variable_names();
    auto set = [&](const std::string& n, Value v) {
        auto it = std::find(names.begin(), names.end(), n);
        s.values[static_cast<std::size_t>(it - names.begin())] = v;
    };
    EvalScope scope{"stamp.stampCylinder", {{"targetPressure", Value::integer(40)}}};
    auto parse_cond = [&](const std::string& text) {
        // Conditions are parsed through a scenario assertion on absolute names.
        auto r = parse_scenario("invoke stamp.stampCylinder.extend(40)\nat 0 expect " + text + "\n", m);
        EXPECT_TRUE(r.scenario.has_value()) << text;
        return r.scenario->assertions[0].expr;
    };
    set("stamp.stampCylinder.pressureSensor.Signal", Value::integer(1));
    EXPECT_TRUE(eval_condition(s, *parse_cond("stamp.stampCylinder.pressureSensor.Signal == 1"), EvalScope{}));

    auto ge = make_binary(BinaryOp::Ge, make_ref({"pressureSensor", "Signal"}), make_ref({"targetPressure"}));
    set("stamp.stampCylinder.pressureSensor.Signal", Value::integer(40));
    EXPECT_TRUE(eval_condition(s, *ge, scope));
    set("stamp.stampCylinder.pressureSensor.Signal", Value::integer(39));
    EXPECT_FALSE(eval_condition(s, *ge, scope));
}

namespace {

// Direct recursive evaluation over a name -> value table. INT arithmetic wraps
// at 32 bits.
struct Reference {
    std::map<std::string, Value> vars;

    static std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

    Value eval(const Expr& e) const {
        if (auto* v = std::get_if<Value>(&e.node)) return *v;
        if (auto* r = std::get_if<RefExpr>(&e.node)) return vars.at(join_path(r->path));
        if (auto* u = std::get_if<UnaryExpr>(&e.node)) {
            Value x = eval(*u->operand);
            if (u->op == UnaryOp::Not) return Value::boolean(!x.as_bool());
            if (x.type() == TypeTag::Int) return Value::integer(wrap(-static_cast<std::int64_t>(x.as_int())));
            return Value::real(-x.as_real());
        }
        const auto& b = std::get<BinaryExpr>(e.node);
        Value l = eval(*b.lhs), r = eval(*b.rhs);
        auto num = [](const Value& v) { return v.type() == TypeTag::Int ? double(v.as_int()) : v.as_real(); };
        switch (b.op) {
            case BinaryOp::Or: return Value::boolean(l.as_bool() || r.as_bool());
            case BinaryOp::And: return Value::boolean(l.as_bool() && r.as_bool());
            case BinaryOp::Eq: return Value::boolean(l == r);
            case BinaryOp::Ne: return Value::boolean(!(l == r));
            case BinaryOp::Lt: return Value::boolean(num(l) < num(r));
            case BinaryOp::Le: return Value::boolean(num(l) <= num(r));
            case BinaryOp::Gt: return Value::boolean(num(l) > num(r));
            case BinaryOp::Ge: return Value::boolean(num(l) >= num(r));
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
                if (l.type() == TypeTag::Int) {
                    std::int64_t x = l.as_int(), y = r.as_int();
                    return Value::integer(wrap(b.op == BinaryOp::Add ? x + y : b.op == BinaryOp::Sub ? x - y : x * y));
                } else {
                    double x = l.as_real(), y = r.as_real();
                    return Value::real(b.op == BinaryOp::Add ? x + y : b.op == BinaryOp::Sub ? x - y : x * y);
                }
        }
        return {};
    }
};

class ExprGen {
public:
    ExprGen(std::mt19937_64& rng, const std::map<std::string, Value>& vars) : rng_(rng) {
        for (const auto& [n, v] : vars) byType_[v.type()].push_back(n);
    }

    ExprPtr gen(TypeTag t, int depth) {
        if (depth == 0 || uni(0, 3) == 0) return leaf(t);
        switch (t) {
            case TypeTag::Bool: {
                int k = uni(0, 3);
                if (k == 0) return make_unary(UnaryOp::Not, gen(t, depth - 1));
                if (k == 1) return make_binary(uni(0, 1) ? BinaryOp::And : BinaryOp::Or, gen(t, depth - 1), gen(t, depth - 1));
                TypeTag x = uni(0, 2) == 0 ? TypeTag::Bool : uni(0, 1) ? TypeTag::Int : TypeTag::Real;
                BinaryOp op = x == TypeTag::Bool ? (uni(0, 1) ? BinaryOp::Eq : BinaryOp::Ne)
                                                 : static_cast<BinaryOp>(uni(2, 7));
                return make_binary(op, gen(x, depth - 1), gen(x, depth - 1));
            }
            default: {
                int k = uni(0, 3);
                if (k == 0) return make_unary(UnaryOp::Neg, gen(t, depth - 1));
                BinaryOp op = k == 1 ? BinaryOp::Add : k == 2 ? BinaryOp::Sub : BinaryOp::Mul;
                return make_binary(op, gen(t, depth - 1), gen(t, depth - 1));
            }
        }
    }

private:
    int uni(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    ExprPtr leaf(TypeTag t) {
        auto& names = byType_[t];
        if (!names.empty() && uni(0, 2) > 0) {
            const std::string& n = names[static_cast<std::size_t>(uni(0, static_cast<int>(names.size()) - 1))];
            std::vector<std::string> path;
            std::size_t start = 0;
            for (std::size_t dot; (dot = n.find('.', start)) != std::string::npos; start = dot + 1) {
                path.push_back(n.substr(start, dot - start));
            }
            path.push_back(n.substr(start));
            return make_ref(path);
        }
        switch (t) {
            case TypeTag::Bool: return make_literal(Value::boolean(uni(0, 1)));
            case TypeTag::Int: return make_literal(Value::integer(uni(0, 3) == 0 ? INT_MAX - uni(0, 5) : uni(-100, 100)));
            default: return make_literal(Value::real(uni(-400, 400) / 8.0));
        }
    }

    std::mt19937_64& rng_;
    std::map<TypeTag, std::vector<std::string>> byType_;
};

}  // namespace

TEST(EvalCondition, RandomExpressionsMatchReferenceEvaluator) {
    std::mt19937_64 rng(99);
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 1000; ++seed) {
        Model m = testgen::random_model(seed);
        Scenario sc = testgen::random_scenario(m, seed, 10);
        ScanState s = init_run(m, sc.invocation);
        Reference ref;
        const auto& names = s.variable_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            Value v = s.values[i];
            switch (v.type()) {
                case TypeTag::Bool: v = Value::boolean(rng() % 2); break;
                case TypeTag::Int: v = Value::integer(static_cast<std::int32_t>(rng() % 2001) - 1000); break;
                case TypeTag::Real: v = Value::real(static_cast<double>(rng() % 4001) / 16.0 - 100.0); break;
                case TypeTag::Time: break;
            }
            s.values[i] = v;
            ref.vars[names[i]] = v;
        }
        ExprGen gen(rng, ref.vars);
        for (int k = 0; k < 50; ++k, ++checked) {
            TypeTag t = k % 3 == 0 ? TypeTag::Int : k % 3 == 1 ? TypeTag::Real : TypeTag::Bool;
            ExprPtr e = gen.gen(t, 4);
            Value want = ref.eval(*e);
            Value got = evaluate(s, *e, EvalScope{});
            ASSERT_EQ(got.type(), want.type());
            if (t == TypeTag::Real) {
                EXPECT_NEAR(got.as_real(), want.as_real(), 1e-9 * std::max(1.0, std::abs(want.as_real())));
            } else {
                EXPECT_EQ(got, want);
            }
            if (t == TypeTag::Bool) {
                EXPECT_EQ(eval_condition(s, *e, EvalScope{}), want.as_bool());
            }
        }
    }
}

// --- properties over every corpus trace -------------------------------------------

namespace {

struct CorpusRun {
    std::string name;
    Model model;
    Scenario scenario;
    std::vector<Step> steps;
};

const std::vector<CorpusRun>& corpus_runs() {
    static const std::vector<CorpusRun> runs = [] {
        std::vector<CorpusRun> out;
        for (const auto& cm : testcorpus::models()) {
            Model m = testcorpus::load_model(cm.model);
            for (const auto& p : cm.scenarios) {
                Scenario sc = testcorpus::load_scenario(p, m);
                out.push_back({p.stem().string(), m, sc, stepped_run(m, sc)});
            }
        }
        return out;
    }();
    return runs;
}

}  // namespace

TEST(TraceProperties, SteppedRunEqualsRun) {
    for (const auto& r : corpus_runs()) {
        Trace t = run(r.model, r.scenario);
        ASSERT_EQ(t.cycles.size(), r.steps.size()) << r.name;
        for (std::size_t i = 0; i < t.cycles.size(); ++i) {
            EXPECT_EQ(t.cycles[i].vars, r.steps[i].record.vars) << r.name;
            EXPECT_EQ(t.cycles[i].fired, r.steps[i].record.fired) << r.name;
        }
    }
}

TEST(TraceProperties, AtMostOneTransitionPerInstancePerCycle) {
    for (const auto& r : corpus_runs()) {
        EXPECT_EQ(scanoracle::multiple_firings(r.steps), std::vector<std::string>{}) << r.name;
    }
}

TEST(TraceProperties, CompletionNeverFiresWhileTheCalleeRuns) {
    int checked = 0;
    for (const auto& r : corpus_runs()) {
        EXPECT_EQ(scanoracle::premature_completions(r.model, r.steps, &checked), std::vector<std::string>{}) << r.name;
    }
    EXPECT_GT(checked, 30);
}

TEST(TraceProperties, ResumeNeverRestartsThePausedCallee) {
    for (const auto& r : corpus_runs()) {
        std::set<std::string> paused;
        for (const auto& st : r.steps) {
            for (const auto& [k, status] : st.before) {
                if (status == InstanceStatus::Paused) paused.insert(k.str());
            }
            for (const auto& f : st.record.fired) {
                if (f.from == "start") {
                    EXPECT_FALSE(paused.count(f.instance)) << r.name << " cycle " << st.record.cycle;
                }
                if (f.to == "end") paused.erase(f.instance);
            }
        }
    }
}

TEST(TraceProperties, DetachedInstancesProgressEveryCycle) {
    int detachedSteps = 0;
    for (const auto& r : corpus_runs()) {
        for (const auto& st : r.steps) {
            for (const auto& [k, status] : st.before) {
                if (status != InstanceStatus::Detached) continue;
                ++detachedSteps;
                bool firedOne = false, listed = false, reattached = false;
                for (const auto& f : st.record.fired) firedOne |= f.instance == k.str();
                for (const auto& d : st.record.detached) listed |= d.instance == k.str();
                for (const auto& a : st.record.active) reattached |= a.instance == k.str();
                EXPECT_TRUE(firedOne || listed || reattached) << r.name << " cycle " << st.record.cycle << " " << k.str();
            }
        }
    }
    EXPECT_GT(detachedSteps, 3);
}

TEST(TraceProperties, UnassignedVariablesKeepTheirValue) {
    for (const auto& r : corpus_runs()) {
        Topo topo(r.model);
        // Variables each function instance can write.
        auto writes = [&](const std::string& key) {
            std::set<std::string> out;
            auto [path, fn] = split_key(key);
            auto def = find_effective_function(r.model, topo.blockOf.at(path), fn);
            if (!def || !def->body) return out;
            auto add = [&](const std::vector<Assignment>& as) {
                for (const auto& a : as) out.insert(path + "." + a.target.back());
            };
            for (const auto& n : def->body->nodes) {
                add(n.entry);
                add(n.exit);
                if (auto* s = std::get_if<SetAction>(&n.action)) add(s->assignments);
                if (auto* c = std::get_if<CallAction>(&n.action); c && c->function == "setSignal") {
                    out.insert(path + "." + c->target[0] + ".Signal");
                }
            }
            for (const auto& t : def->body->transitions) add(t.operation);
            return out;
        };
        const CycleRecord* prev = nullptr;
        for (const auto& st : r.steps) {
            std::set<std::string> allowed;
            for (const auto& [n, v] : st.record.inputs) allowed.insert(n);
            for (const auto& f : st.record.fired) allowed.merge(writes(f.instance));
            for (const auto& a : st.record.active) allowed.merge(writes(a.instance));
            for (const auto& d : st.record.detached) allowed.merge(writes(d.instance));
            if (prev) {
                for (std::size_t i = 0; i < st.record.vars.size(); ++i) {
                    const auto& [name, v] = st.record.vars[i];
                    if (!(v == prev->vars[i].second)) {
                        EXPECT_TRUE(allowed.count(name)) << r.name << " cycle " << st.record.cycle << " " << name;
                    }
                }
            }
            prev = &st.record;
        }
    }
}

TEST(TraceProperties, EveryPolicyIsExercised) {
    std::set<std::string> transitionsToPaused, detachedSeen;
    for (const auto& r : corpus_runs()) {
        for (const auto& st : r.steps) {
            for (const auto& [k, s] : st.before) {
                if (s == InstanceStatus::Paused) transitionsToPaused.insert(r.name);
                if (s == InstanceStatus::Detached) detachedSeen.insert(r.name);
            }
        }
    }
    EXPECT_TRUE(transitionsToPaused.count("policies_resume"));
    EXPECT_TRUE(detachedSeen.count("policies_continue"));
    EXPECT_FALSE(transitionsToPaused.count("policies_restart"));
    EXPECT_FALSE(detachedSeen.count("policies_restart"));
}
