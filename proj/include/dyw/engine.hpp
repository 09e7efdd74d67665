// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_ENGINE_HPP_
#define DYW_ENGINE_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dyw/diagnostics.hpp"
#include "dyw/dsl.hpp"
#include "dyw/plan.hpp"
#include "dyw/term.hpp"

namespace dyw::engine {

struct Options {
    std::size_t strategy_cap = 100000;
    std::size_t derivation_budget = 1000000;
    /// Mutated slots per strategy. Two substitutions suffice for every attack
    /// in the built-in corpus; raising this widens the bounded search.
    int max_mutations = 2;
    std::optional<dsl::AttackerMode> attacker_override;
};

struct DerivationNode;
using DerivationPtr = std::shared_ptr<const DerivationNode>;

/// One node of a proof that the attacker can produce a term.
struct DerivationNode {
    std::string rule;
    term::Term t;
    std::vector<DerivationPtr> children;
};

std::string render(const DerivationNode& node, int indent = 0);

/// Monotone set of attacker-known terms, each stamped with the phase at
/// which it became known. Tuples decompose on insertion; ENC/AEAD_ENC
/// plaintexts are closed over by Deriver::saturate.
class KnowledgeBase {
public:
    struct Entry {
        term::Term t;
        int phase;
        DerivationPtr how;  // set for terms obtained by decomposition
    };

    /// Adds a term (idempotent; keeps the smallest phase seen). Returns true
    /// if the set grew or a phase improved.
    bool add(const term::Term& t, int phase, DerivationPtr how = nullptr);

    bool contains(const term::Term& t, int max_phase) const;
    const Entry* find(const term::Term& t) const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::uint64_t version() const { return version_; }

private:
    std::vector<Entry> entries_;
    std::map<term::Term, std::size_t, term::TermLess> index_;
    std::uint64_t version_ = 0;
};

/// Derivability search: decomposition saturation first, then goal-directed
/// composition with memoization on (term, phase). The shared node budget
/// turns runaway searches into an InconclusiveError.
class Deriver {
public:
    Deriver(KnowledgeBase& kb, std::size_t budget);

    /// Closes the knowledge base under decryption for all phases up to
    /// max_phase. Call before derive.
    void saturate(int max_phase);

    /// Proof that `goal` is producible from terms known at or before
    /// `phase`, or nullptr.
    DerivationPtr derive(const term::Term& goal, int phase);

private:
    DerivationPtr compose(const term::Term& goal, int phase);
    void tick();

    KnowledgeBase& kb_;
    std::size_t budget_;
    std::size_t used_ = 0;
    std::uint64_t memo_version_ = 0;
    std::map<std::pair<term::Term, int>, DerivationPtr> memo_true_;
    std::set<std::pair<term::Term, int>> memo_false_;
};

struct TraceEvent {
    enum class Kind { Observe, Mutate, Leak, Derive };
    Kind kind;
    int message_index = -1;  // -1 for leak and derive events
    std::string slot;        // slot name, or leaked identifier
    term::Term t;
    int phase = 0;
    std::string principal;  // message sender / leaking principal
};

const char* to_string(TraceEvent::Kind k);

/// Per-slot replacement choice of the active attacker.
struct SlotChoice {
    enum class Kind {
        Original,
        Fresh,   // one fresh attacker nonce per slot
        Pubkey,  // G^{mal} with mal attacker-known
        Forge,   // original skeleton rebuilt from attacker-derivable parts
        Replay,  // a term observed in an earlier message with the same shape
    };
    Kind kind = Kind::Original;
    std::size_t replay_message = 0;
    std::size_t replay_slot = 0;
};

using SlotKey = std::pair<std::size_t, std::size_t>;  // (message index, slot index)

struct MutationStrategy {
    std::map<SlotKey, SlotChoice> choices;

    std::size_t mutation_count() const { return choices.size(); }
};

/// What actually happened at one plan step during a run.
struct StepRecord {
    bool executed = false;
    bool success = false;
    std::vector<term::Term> args;  // evaluated direct arguments of the root expression
};

struct Execution {
    MutationStrategy strategy;
    std::map<std::string, std::map<std::string, term::Term>> bindings;
    KnowledgeBase kb;
    std::vector<TraceEvent> events;
    std::vector<StepRecord> records;                       // parallel to plan.steps
    std::map<std::string, std::size_t> abort_step;         // failed checked op per principal
    std::map<std::string, std::size_t> blocked_step;       // starved of inputs per principal
    std::map<SlotKey, std::pair<term::Term, term::Term>> wire;  // sent, delivered
    int final_phase = 0;

    bool completed(const std::string& principal) const {
        return !abort_step.count(principal) && !blocked_step.count(principal);
    }
};

struct Verdict {
    dsl::Query query;
    bool violated = false;
    std::vector<TraceEvent> trace;  // populated when violated
    DerivationPtr derivation;       // confidentiality violations carry the proof
    MutationStrategy strategy;      // the violating strategy, for deterministic replay
};

/// Runs the plan under one fixed strategy.
Execution run_execution(const plan::ExecutablePlan& plan, const MutationStrategy& strategy,
                        const Options& opts);

/// Passive mode: the single all-Original execution. Active mode: one
/// execution per strategy in the bounded space, ordered by mutation count
/// and slot position (so the first violating execution is the minimal one).
std::vector<Execution> explore(const plan::ExecutablePlan& plan, dsl::AttackerMode mode,
                               const Options& opts);

Verdict check_query(const plan::ExecutablePlan& plan, const std::vector<Execution>& executions,
                    const dsl::Query& query, const Options& opts);

class AnalysisError : public std::runtime_error {
public:
    AnalysisError(std::string stage_, const std::string& what)
        : std::runtime_error(stage_ + ": " + what), stage(std::move(stage_)) {}
    std::string stage;
};

/// validate -> compile -> explore -> check_query, one verdict per query in
/// model order.
std::vector<Verdict> analyze(const dsl::ModelAST& ast, const Options& opts = {});

/// Stable JSON form of a verdict (the schema shared with the CLI).
std::string verdict_to_json(const std::string& model_name, const Verdict& verdict);

}  // namespace dyw::engine

#endif  // DYW_ENGINE_HPP_
