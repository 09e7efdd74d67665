// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_TESTS_INVARIANTS_HPP_
#define DYW_TESTS_INVARIANTS_HPP_

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dyw/engine.hpp"
#include "dyw/plan.hpp"
#include "dyw/term.hpp"

namespace dyw::testing {

// Engine-level properties checked over one model. Returns human-readable
// failure descriptions; empty means every invariant held.
inline std::vector<std::string> check_engine_invariants(const dsl::ModelAST& ast,
                                                        const engine::Options& opts) {
    std::vector<std::string> failures;
    auto fail = [&](const std::string& what) { failures.push_back(what); };

    auto diags = dsl::validate(ast);
    if (!diags.empty()) {
        fail("generator produced an invalid model: " + format(diags));
        return failures;
    }
    plan::ExecutablePlan p = plan::compile(ast);

    std::vector<engine::Execution> passive;
    std::vector<engine::Execution> active;
    try {
        passive = engine::explore(p, dsl::AttackerMode::Passive, opts);
        active = engine::explore(p, dsl::AttackerMode::Active, opts);
    } catch (const std::exception& e) {
        fail(std::string("explore failed: ") + e.what());
        return failures;
    }

    // Guard integrity: guarded slots always deliver the originator's term.
    for (const auto& ex : active) {
        for (const auto& [key, pair] : ex.wire) {
            for (const auto& step : p.steps) {
                if (step.kind != plan::Step::Kind::Send || step.message_index != key.first)
                    continue;
                if (step.slots[key.second].guarded && !term::equal(pair.first, pair.second))
                    fail("guarded slot " + step.slots[key.second].name + " was mutated");
            }
        }
    }

    // Passive results are a subset of active results.
    for (const auto& q : p.queries) {
        auto vp = engine::check_query(p, passive, q, opts);
        auto va = engine::check_query(p, active, q, opts);
        if (vp.violated && !va.violated)
            fail("query " + dsl::to_string(q) + " violated passively but not actively");
    }

    // Knowledge monotonicity: growing the knowledge base never loses goals.
    {
        const auto& ex = passive.front();
        for (const auto& [principal, view] : ex.bindings) {
            for (const auto& [name, goal] : view) {
                engine::KnowledgeBase kb = ex.kb;
                engine::Deriver d1(kb, opts.derivation_budget);
                d1.saturate(ex.final_phase);
                bool before = d1.derive(goal, ex.final_phase) != nullptr;
                if (!before) continue;
                engine::KnowledgeBase wider = ex.kb;
                wider.add(term::fresh("Z", "extra_knowledge", 0), 0);
                wider.add(term::attacker_value("extra_attacker", 0), 0);
                engine::Deriver d2(wider, opts.derivation_budget);
                d2.saturate(ex.final_phase);
                if (!d2.derive(goal, ex.final_phase))
                    fail("monotonicity lost for " + name + " = " + term::render(goal));
            }
        }
    }

    // Freshness soundness: a fresh value that never appears inside anything
    // transmitted or leaked is never derivable.
    {
        std::set<term::Term> exposed;
        for (const auto& ex : active) {
            for (const auto& [key, pair] : ex.wire) {
                for (const auto& s : term::subterms(pair.first)) exposed.insert(s);
                for (const auto& s : term::subterms(pair.second)) exposed.insert(s);
            }
            for (const auto& ev : ex.events)
                if (ev.kind == engine::TraceEvent::Kind::Leak)
                    for (const auto& s : term::subterms(ev.t)) exposed.insert(s);
        }
        for (const auto& step : p.steps) {
            if (step.kind != plan::Step::Kind::Generate || step.knows) continue;
            term::Term value = term::fresh(step.principal, step.names[0], step.phase);
            if (exposed.count(value)) continue;
            for (const auto& ex : active) {
                engine::KnowledgeBase kb = ex.kb;
                engine::Deriver d(kb, opts.derivation_budget);
                d.saturate(ex.final_phase);
                if (d.derive(value, ex.final_phase)) {
                    fail("never-exposed fresh value " + step.names[0] + " became derivable");
                    break;
                }
            }
        }
    }

    // Phase causality: every substituted term is derivable from what the
    // attacker had strictly before the message, at that phase.
    for (const auto& ex : active) {
        for (std::size_t i = 0; i < ex.events.size(); ++i) {
            const auto& ev = ex.events[i];
            if (ev.kind != engine::TraceEvent::Kind::Mutate) continue;
            engine::KnowledgeBase probe;
            for (std::size_t j = 0; j < i; ++j) {
                const auto& prior = ex.events[j];
                if (prior.kind == engine::TraceEvent::Kind::Leak)
                    probe.add(prior.t, prior.phase);
                if (prior.kind == engine::TraceEvent::Kind::Observe &&
                    prior.message_index < ev.message_index)
                    probe.add(prior.t, prior.phase);
            }
            engine::Deriver d(probe, opts.derivation_budget);
            d.saturate(ev.phase);
            if (!d.derive(ev.t, ev.phase))
                fail("mutation of " + ev.slot + " used knowledge from the future: " +
                     term::render(ev.t));
        }
    }

    // Trace replay: the recorded strategy deterministically reproduces every
    // violation.
    for (const auto& q : p.queries) {
        auto verdict = engine::check_query(p, active, q, opts);
        if (!verdict.violated) continue;
        std::vector<engine::Execution> replay;
        replay.push_back(active.front());  // honest baseline for comparison
        replay.push_back(engine::run_execution(p, verdict.strategy, opts));
        auto again = engine::check_query(p, replay, q, opts);
        if (!again.violated)
            fail("replaying the strategy for " + dsl::to_string(q) +
                 " did not reproduce the violation");
    }

    return failures;
}

}  // namespace dyw::testing

#endif  // DYW_TESTS_INVARIANTS_HPP_
