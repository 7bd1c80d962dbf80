#pragma once

// Hand-traced cycle tables and trace property checks shared by the simulator
// tests and the acceptance binary.

#include <map>
#include <string>
#include <vector>

#include "modat/simulator.hpp"

namespace scanoracle {

struct Row {
    int cycle = 0;
    std::vector<std::string> fired;     // "instance:from->to"
    std::vector<std::string> detached;  // "instance:node"
    std::vector<std::pair<std::string, modat::Value>> vars;
};

struct HandTrace {
    std::string name;
    std::string model;     // relative to the corpus root
    std::string scenario;  // relative to the corpus root
    std::vector<Row> rows;
    bool completes = true;
};

/// Pressure ramp of extend(40) plus the resume, restart and continue runs.
const std::vector<HandTrace>& hand_traces();

/// First difference between a trace and a table, or "".
std::string table_mismatch(const modat::Trace& trace, const std::vector<Row>& rows);

/// Statuses before one cycle and the cycle's record.
struct Step {
    std::map<modat::InstanceKey, modat::InstanceStatus> before;
    modat::CycleRecord record;
};

/// Runs a scenario cycle by cycle through init_run/step_cycle.
std::vector<Step> stepped_run(const modat::Model& model, const modat::Scenario& scenario);

/// Instances that fired more than one transition within a cycle.
std::vector<std::string> multiple_firings(const std::vector<Step>& steps);

/// Completion transitions of call nodes whose composite callee was not
/// Completed before the cycle. `checked` counts the inspected transitions.
std::vector<std::string> premature_completions(const modat::Model& model, const std::vector<Step>& steps,
                                               int* checked = nullptr);

}  // namespace scanoracle
