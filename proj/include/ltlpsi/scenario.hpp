#pragma once

// On-disk formats: scenario files (input), plan files and trace files
// (artifacts). All three are JSON. Serialization is deterministic — object
// keys appear in a fixed order and arrays in construction order — so equal
// inputs produce byte-identical files.
//
// A scenario comes in one of two forms:
//
//   * synthesis form: declares the action alphabet, the binding ids, the
//     task string, and per-agent capability automata. Each capability lists
//     named states, an initial state, per-state label sets, and weighted
//     transitions; unless "auto_holds" is false, every state additionally
//     gets a free self-transition so the agent can always wait. Agents are
//     composed from their capabilities at load time.
//
//   * roster form: declares the binding ids and per-agent binding
//     assignments with costs, no automata. Used as input to sub-team
//     selection on its own.
//
// An agent entry may optionally carry a "cost" (default 0), used by
// cost-aware sub-team selection.

#include <optional>
#include <string>
#include <vector>

#include "ltlpsi/agent.hpp"
#include "ltlpsi/buchi.hpp"
#include "ltlpsi/executor.hpp"
#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

struct ScenarioAgent {
    std::string name;
    double cost = 0.0;
    std::optional<AgentModel> model;  // synthesis form
    BindingSet assignment = 0;        // roster form
};

struct Scenario {
    Vocab vocab;
    std::string task;  // empty in roster form
    std::vector<ScenarioAgent> agents;

    bool roster() const { return task.empty(); }
};

// Parses and validates a scenario document. Throws ScenarioError with a
// slash-separated path to the offending field; propagates ParseError from
// the embedded task string.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// ---------------------------------------------------------------------------
// Plan files: everything needed to re-execute a synthesized team against its
// scenario — the vocabulary, the task in canonical form, the planning
// automaton, and the team plan (with `team` indexing the scenario's agent
// list).
// ---------------------------------------------------------------------------

struct StoredPlan {
    Vocab vocab;
    std::string task;  // canonical rendering of the synthesized task
    BuchiAutomaton automaton;
    TeamPlan plan;
    std::vector<std::string> team_names;  // parallel to plan.team
};

std::string plan_to_json(const StoredPlan& p);

// Parses and structurally validates a plan document: automaton indices in
// range, path alternation intact (beta and per-state self edges are
// recomputed and checked against the stored ones), team entries parallel and
// each assignment inside its stored family. Throws Error with the offending
// field's path.
StoredPlan plan_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Trace files: a serialized TeamTrace.
// ---------------------------------------------------------------------------

std::string trace_to_json(const TeamTrace& trace, const Vocab& vocab);
TeamTrace trace_from_json(const std::string& text, const Vocab& vocab);

// Reads a whole file / writes a string to a file. Throw Error on I/O
// failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace ltlpsi
