#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "modat/model.hpp"
#include "modat/parser.hpp"

namespace modat {

enum class InstanceStatus { Fresh, Running, Paused, Detached, Completed };

std::string_view to_string(InstanceStatus s);
std::string_view to_string(TransitionKind k);

enum class SimErrorCode { UnknownTarget, ArityMismatch, TypeMismatch, RuntimeTypeError, DivergenceGuard };

class SimulationError : public std::runtime_error {
public:
    SimulationError(SimErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    SimErrorCode code() const { return code_; }

private:
    SimErrorCode code_;
};

/// (object path, function name)
struct InstanceKey {
    std::string path;
    std::string function;

    std::string str() const { return path + "." + function; }
    friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
};

struct FiredTransition {
    std::string instance;
    std::string from;  // node id or "start"
    std::string to;    // node id or "end"
    TransitionKind kind;

    friend bool operator==(const FiredTransition&, const FiredTransition&) = default;
};

struct ActiveNode {
    std::string instance;
    std::string node;

    friend bool operator==(const ActiveNode&, const ActiveNode&) = default;
};

struct AssertionOutcome {
    int cycle = 0;
    std::string expr;
    bool expected = true;
    bool passed = false;
    bool reached = true;
};

struct CycleRecord {
    int cycle = 0;
    std::vector<std::pair<std::string, Value>> inputs;
    std::vector<FiredTransition> fired;
    std::vector<ActiveNode> active;    // root-to-leaf call chain
    std::vector<ActiveNode> detached;  // detached instances, stepping order
    std::vector<std::pair<std::string, Value>> vars;
    std::vector<AssertionOutcome> asserts;
};

/// Persistent execution record of one function on one object.
struct FunctionInstance {
    InstanceKey key;
    InstanceStatus status = InstanceStatus::Fresh;
    int activeNode = -1;
    int doCount = 0;  // Do steps executed in the active node
    std::vector<Value> args;
    long lastStepped = -1;
    // System-call progress of the active node: elapsed time / Do steps.
    Duration timerElapsed{0};
    int timerSteps = 0;
    bool timerDone = false;
};

struct Topology;

/// Everything needed to continue a run. Copyable; copies evolve independently.
struct ScanState {
    std::shared_ptr<const Topology> topology;
    std::vector<Value> values;  // indexed like variable_names()
    std::map<InstanceKey, FunctionInstance> instances;
    InstanceKey root;
    int cycle = 0;

    const std::vector<std::string>& variable_names() const;
    Value value_of(std::string_view qualifiedName) const;
    const FunctionInstance* instance(const InstanceKey& key) const;
    bool finished() const;
};

/// `path.Signal := value` for an Input component, applied before the cycle runs.
struct InputLatch {
    std::string componentPath;
    Value value;
};

ScanState init_run(const Model& model, const Invocation& invocation);

/// Executes exactly one scan cycle.
CycleRecord step_cycle(ScanState& state, const std::vector<InputLatch>& inputs);

/// Pure form of step_cycle.
std::pair<ScanState, CycleRecord> step_cycle(const ScanState& state, const std::vector<InputLatch>& inputs);

/// Name scope for expression evaluation. With an object path, one-segment
/// references are parameters and `lane.attr` resolves against that object;
/// without one, references are absolute `<instancePath>.<attr>` names.
struct EvalScope {
    std::optional<std::string> objectPath;
    std::vector<std::pair<std::string, Value>> params;
};

Value evaluate(const ScanState& state, const Expr& expr, const EvalScope& scope);
bool eval_condition(const ScanState& state, const Expr& expr, const EvalScope& scope);

struct Trace {
    std::vector<CycleRecord> cycles;
    bool completed = false;  // root done and nothing detached
    bool diverged = false;   // maxCycles reached first
    std::vector<AssertionOutcome> assertions;

    int passed() const;
    bool ok() const { return !diverged && passed() == static_cast<int>(assertions.size()); }
};

Trace run(const Model& model, const Scenario& scenario);

std::string record_to_json(const CycleRecord& record);
/// One JSON object per line, one line per cycle.
std::string trace_to_jsonl(const Trace& trace);

}  // namespace modat
