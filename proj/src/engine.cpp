// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "dyw/engine.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace dyw::engine {

using term::Kind;
using term::Prim;
using term::Term;

namespace {

DerivationPtr node(std::string rule, const Term& t, std::vector<DerivationPtr> children = {}) {
    auto n = std::make_shared<DerivationNode>();
    n->rule = std::move(rule);
    n->t = t;
    n->children = std::move(children);
    return n;
}

}  // namespace

std::string render(const DerivationNode& n, int indent) {
    std::ostringstream os;
    for (int i = 0; i < indent; ++i) os << "  ";
    os << n.rule << ": " << term::render(n.t) << '\n';
    for (const auto& c : n.children) os << render(*c, indent + 1);
    return os.str();
}

const char* to_string(TraceEvent::Kind k) {
    switch (k) {
        case TraceEvent::Kind::Observe: return "observe";
        case TraceEvent::Kind::Mutate: return "mutate";
        case TraceEvent::Kind::Leak: return "leak";
        case TraceEvent::Kind::Derive: return "derive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// KnowledgeBase

bool KnowledgeBase::add(const term::Term& t, int phase, DerivationPtr how) {
    auto it = index_.find(t);
    if (it != index_.end()) {
        Entry& e = entries_[it->second];
        if (phase >= e.phase) return false;
        e.phase = phase;  // same term, earlier phase
        if (how) e.how = std::move(how);
        ++version_;
        return true;
    }
    index_.emplace(t, entries_.size());
    entries_.push_back(Entry{t, phase, std::move(how)});
    ++version_;
    // Tuples decompose immediately; elements were observable alongside.
    if (t->kind == Kind::Tuple) {
        for (std::size_t i = 0; i < t->children.size(); ++i) {
            add(t->children[i], phase,
                node("tuple-element", t->children[i], {node("known", t)}));
        }
    }
    return true;
}

bool KnowledgeBase::contains(const term::Term& t, int max_phase) const {
    auto it = index_.find(t);
    return it != index_.end() && entries_[it->second].phase <= max_phase;
}

const KnowledgeBase::Entry* KnowledgeBase::find(const term::Term& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

// ---------------------------------------------------------------------------
// Deriver

Deriver::Deriver(KnowledgeBase& kb, std::size_t budget) : kb_(kb), budget_(budget) {}

void Deriver::tick() {
    if (memo_version_ != kb_.version()) {
        // Growth can only turn "no" into "yes"; positive results stay valid.
        memo_false_.clear();
        memo_version_ = kb_.version();
    }
    if (++used_ > budget_)
        throw InconclusiveError("derivability search budget (" + std::to_string(budget_) +
                                " nodes) exceeded; result inconclusive");
}

void Deriver::saturate(int max_phase) {
    for (int p = 0; p <= max_phase; ++p) {
        bool changed = true;
        while (changed) {
            changed = false;
            const auto snapshot = kb_.entries();
            for (const auto& e : snapshot) {
                if (e.phase > p || e.t->kind != Kind::Prim) continue;
                if (e.t->prim == Prim::ENC) {
                    const Term& key = e.t->children[0];
                    const Term& msg = e.t->children[1];
                    if (kb_.contains(msg, p)) continue;
                    if (auto dk = compose(key, p)) {
                        kb_.add(msg, p, node("decrypt", msg, {node("known", e.t), dk}));
                        changed = true;
                    }
                } else if (e.t->prim == Prim::AEAD_ENC) {
                    const Term& key = e.t->children[0];
                    const Term& msg = e.t->children[1];
                    const Term& ad = e.t->children[2];
                    if (kb_.contains(msg, p)) continue;
                    auto dk = compose(key, p);
                    if (!dk) continue;
                    if (auto dad = compose(ad, p)) {
                        kb_.add(msg, p, node("decrypt", msg, {node("known", e.t), dk, dad}));
                        changed = true;
                    }
                }
            }
        }
    }
}

DerivationPtr Deriver::derive(const term::Term& goal, int phase) { return compose(goal, phase); }

DerivationPtr Deriver::compose(const term::Term& goal, int phase) {
    tick();
    auto key = std::make_pair(goal, phase);
    if (auto it = memo_true_.find(key); it != memo_true_.end()) return it->second;
    if (memo_false_.count(key)) return nullptr;

    DerivationPtr result;
    if (const auto* e = kb_.find(goal); e && e->phase <= phase) {
        result = e->how ? e->how : node("known", goal);
    } else {
        switch (goal->kind) {
            case Kind::PublicConstant:
                result = node("public", goal);
                break;
            case Kind::AttackerValue:
                if (goal->phase <= phase) result = node("attacker", goal);
                break;
            case Kind::FreshValue:
                break;
            case Kind::Tuple: {
                std::vector<DerivationPtr> parts;
                bool ok = true;
                for (const auto& c : goal->children) {
                    auto d = compose(c, phase);
                    if (!d) {
                        ok = false;
                        break;
                    }
                    parts.push_back(std::move(d));
                }
                if (ok) result = node("compose-tuple", goal, std::move(parts));
                break;
            }
            case Kind::Projection: {
                if (auto d = compose(goal->base, phase))
                    result = node("project", goal, {std::move(d)});
                break;
            }
            case Kind::Prim: {
                std::vector<DerivationPtr> parts;
                bool ok = true;
                for (const auto& c : goal->children) {
                    auto d = compose(c, phase);
                    if (!d) {
                        ok = false;
                        break;
                    }
                    parts.push_back(std::move(d));
                }
                if (ok)
                    result = node(std::string("apply-") + term::prim_name(goal->prim), goal,
                                  std::move(parts));
                break;
            }
            case Kind::Exp: {
                // Peel one derivable exponent and derive the remaining power.
                for (std::size_t i = 0; i < goal->children.size() && !result; ++i) {
                    if (i > 0 && term::equal(goal->children[i], goal->children[i - 1]))
                        continue;  // identical exponent, same subproblem
                    auto de = compose(goal->children[i], phase);
                    if (!de) continue;
                    Term rest;
                    if (goal->children.size() == 1) {
                        rest = goal->base;
                    } else {
                        rest = goal->base;
                        for (std::size_t j = 0; j < goal->children.size(); ++j)
                            if (j != i) rest = term::exp(rest, goal->children[j]);
                    }
                    if (auto dr = compose(rest, phase))
                        result = node("exponentiate", goal, {std::move(dr), std::move(de)});
                }
                break;
            }
        }
    }

    if (result)
        memo_true_.emplace(key, result);
    else
        memo_false_.insert(key);
    return result;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

void collect_idents(const dsl::Expr& e, std::set<std::string>& out) {
    switch (e.kind) {
        case dsl::Expr::Kind::Ident:
            out.insert(e.name);
            break;
        case dsl::Expr::Kind::Pow:
            collect_idents(*e.lhs, out);
            collect_idents(*e.rhs, out);
            break;
        case dsl::Expr::Kind::Call:
            for (const auto& a : e.args) collect_idents(*a, out);
            break;
    }
}

class MissingBinding : public std::exception {};

struct EvalResult {
    Term value;
    std::vector<Term> args;  // evaluated direct arguments of the root
};

Term eval_expr(const dsl::Expr& e,
               const std::map<std::string, Term>& view) {
    switch (e.kind) {
        case dsl::Expr::Kind::Ident: {
            if (e.name == "G") return term::generator();
            auto it = view.find(e.name);
            if (it == view.end()) throw MissingBinding{};
            return it->second;
        }
        case dsl::Expr::Kind::Pow:
            return term::exp(eval_expr(*e.lhs, view), eval_expr(*e.rhs, view));
        case dsl::Expr::Kind::Call: {
            Prim p;
            if (!term::lookup_prim(e.name, p))
                throw AnalysisError("execute", "unknown primitive '" + e.name + "'");
            std::vector<Term> args;
            args.reserve(e.args.size());
            for (const auto& a : e.args) args.push_back(eval_expr(*a, view));
            return term::prim(p, std::move(args));
        }
    }
    throw AnalysisError("execute", "malformed expression");
}

EvalResult eval_root(const dsl::Expr& e, const std::map<std::string, Term>& view) {
    EvalResult r;
    switch (e.kind) {
        case dsl::Expr::Kind::Ident:
            r.value = eval_expr(e, view);
            r.args = {r.value};
            break;
        case dsl::Expr::Kind::Pow: {
            Term l = eval_expr(*e.lhs, view);
            Term rr = eval_expr(*e.rhs, view);
            r.args = {l, rr};
            r.value = term::exp(l, rr);
            break;
        }
        case dsl::Expr::Kind::Call: {
            Prim p;
            if (!term::lookup_prim(e.name, p))
                throw AnalysisError("execute", "unknown primitive '" + e.name + "'");
            for (const auto& a : e.args) r.args.push_back(eval_expr(*a, view));
            r.value = term::prim(p, r.args);
            break;
        }
    }
    return r;
}

/// Checked-operation success: the rewrite fired.
bool check_success(const dsl::Expr& e, const std::vector<Term>& args, const Term& result) {
    if (e.kind != dsl::Expr::Kind::Call) return true;
    if (e.name == "SIGNVERIF") return term::equal(result, term::true_constant());
    if (e.name == "AEAD_DEC") {
        const Term& ct = args[1];
        return ct->kind == Kind::Prim && ct->prim == Prim::AEAD_ENC &&
               term::equal(ct->children[0], args[0]) && term::equal(ct->children[2], args[2]);
    }
    return true;
}

Term slot_nonce(std::size_t msg, std::size_t slot) {
    return term::attacker_value("atk" + std::to_string(msg) + "_" + std::to_string(slot), 0);
}

Term attacker_pubkey() {
    return term::exp(term::generator(), term::attacker_value("mal", 0));
}

/// Rebuilds `t` from attacker-derivable material: derivable subterms are
/// kept, values this message already replaced are swapped for their
/// replacement, everything else bottoms out at the slot nonce.
Term forge_term(const Term& t, Deriver& deriver, int phase,
                const std::map<Term, Term, term::TermLess>& same_message, const Term& nonce) {
    if (auto it = same_message.find(t); it != same_message.end()) return it->second;
    if (deriver.derive(t, phase)) return t;
    switch (t->kind) {
        case Kind::Exp: {
            Term acc = forge_term(t->base, deriver, phase, same_message, nonce);
            for (const auto& e : t->children)
                acc = term::exp(acc, forge_term(e, deriver, phase, same_message, nonce));
            return acc;
        }
        case Kind::Prim: {
            std::vector<Term> args;
            args.reserve(t->children.size());
            for (const auto& c : t->children)
                args.push_back(forge_term(c, deriver, phase, same_message, nonce));
            return term::prim(t->prim, std::move(args));
        }
        case Kind::Tuple: {
            std::vector<Term> elems;
            elems.reserve(t->children.size());
            for (const auto& c : t->children)
                elems.push_back(forge_term(c, deriver, phase, same_message, nonce));
            return term::tuple(std::move(elems));
        }
        case Kind::Projection:
            return term::projection(t->index,
                                    forge_term(t->base, deriver, phase, same_message, nonce));
        default:
            return nonce;
    }
}

}  // namespace

Execution run_execution(const plan::ExecutablePlan& plan, const MutationStrategy& strategy,
                        const Options& opts) {
    Execution ex;
    ex.strategy = strategy;
    ex.records.resize(plan.steps.size());
    ex.final_phase = plan.max_phase;
    Deriver deriver(ex.kb, opts.derivation_budget);

    int phase = 0;
    for (std::size_t si = 0; si < plan.steps.size(); ++si) {
        const plan::Step& step = plan.steps[si];
        StepRecord& rec = ex.records[si];
        bool stopped = ex.abort_step.count(step.principal) || ex.blocked_step.count(step.principal);

        switch (step.kind) {
            case plan::Step::Kind::Phase:
                phase = step.new_phase;
                break;

            case plan::Step::Kind::Generate: {
                if (stopped) break;
                const std::string& name = step.names[0];
                Term value;
                if (step.knows) {
                    // `knows` models pre-protocol state, present from phase 0.
                    value = step.knows_public ? term::constant(name) : term::fresh("", name, 0);
                } else {
                    value = term::fresh(step.principal, name, step.phase);
                }
                ex.bindings[step.principal][name] = value;
                rec.executed = true;
                rec.success = true;
                break;
            }

            case plan::Step::Kind::Compute: {
                if (stopped) break;
                const auto& view = ex.bindings[step.principal];
                EvalResult r;
                try {
                    r = eval_root(*step.expr, view);
                } catch (const MissingBinding&) {
                    ex.blocked_step.emplace(step.principal, si);
                    break;
                }
                rec.executed = true;
                rec.args = r.args;
                rec.success = !step.checked || check_success(*step.expr, r.args, r.value);
                if (!rec.success) {
                    ex.abort_step.emplace(step.principal, si);
                    break;
                }
                auto& bind = ex.bindings[step.principal];
                if (step.names.size() == 1) {
                    bind[step.names[0]] = r.value;
                } else if (step.names.size() > 1) {
                    for (std::size_t i = 0; i < step.names.size(); ++i)
                        bind[step.names[i]] = term::projection(i, r.value);
                }
                break;
            }

            case plan::Step::Kind::Leak: {
                // Leaks model compromise of stored state: they fire even for
                // principals that aborted or starved earlier.
                const auto& view = ex.bindings[step.principal];
                for (const auto& name : step.names) {
                    auto it = view.find(name);
                    if (it == view.end()) continue;
                    ex.kb.add(it->second, phase);
                    ex.events.push_back(TraceEvent{TraceEvent::Kind::Leak, -1, name, it->second,
                                                   phase, step.principal});
                }
                rec.executed = true;
                rec.success = true;
                break;
            }

            case plan::Step::Kind::Send: {
                if (stopped) break;
                const auto& view = ex.bindings[step.principal];
                std::vector<Term> sent;
                bool missing = false;
                for (const auto& slot : step.slots) {
                    auto it = view.find(slot.name);
                    if (it == view.end()) {
                        missing = true;
                        break;
                    }
                    sent.push_back(it->second);
                }
                if (missing) {
                    ex.blocked_step.emplace(step.principal, si);
                    break;
                }
                rec.executed = true;
                rec.success = true;

                // Replacement terms may only use knowledge available before
                // this message passes through the attacker.
                std::map<Term, Term, term::TermLess> same_message;
                for (std::size_t sl = 0; sl < step.slots.size(); ++sl) {
                    const dsl::Slot& slot = step.slots[sl];
                    SlotKey key{step.message_index, sl};
                    Term delivered = sent[sl];
                    auto choice_it = strategy.choices.find(key);
                    if (choice_it != strategy.choices.end() && !slot.guarded) {
                        switch (choice_it->second.kind) {
                            case SlotChoice::Kind::Original:
                                break;
                            case SlotChoice::Kind::Fresh:
                                delivered = slot_nonce(step.message_index, sl);
                                break;
                            case SlotChoice::Kind::Pubkey:
                                delivered = attacker_pubkey();
                                break;
                            case SlotChoice::Kind::Forge:
                                deriver.saturate(phase);
                                delivered = forge_term(sent[sl], deriver, phase, same_message,
                                                       slot_nonce(step.message_index, sl));
                                break;
                            case SlotChoice::Kind::Replay: {
                                auto src = ex.wire.find({choice_it->second.replay_message,
                                                         choice_it->second.replay_slot});
                                if (src != ex.wire.end()) delivered = src->second.first;
                                break;
                            }
                        }
                    }
                    if (!term::equal(delivered, sent[sl]))
                        same_message[sent[sl]] = delivered;
                    ex.wire[key] = {sent[sl], delivered};
                }

                for (std::size_t sl = 0; sl < step.slots.size(); ++sl) {
                    const auto& [orig, delivered] = ex.wire[{step.message_index, sl}];
                    ex.events.push_back(TraceEvent{TraceEvent::Kind::Observe,
                                                   static_cast<int>(step.message_index),
                                                   step.slots[sl].name, orig, phase,
                                                   step.principal});
                    ex.kb.add(orig, phase);
                    if (!term::equal(delivered, orig)) {
                        ex.events.push_back(TraceEvent{TraceEvent::Kind::Mutate,
                                                       static_cast<int>(step.message_index),
                                                       step.slots[sl].name, delivered, phase,
                                                       step.principal});
                        ex.kb.add(delivered, phase);
                    }
                    ex.bindings[step.receiver][step.slots[sl].name] = delivered;
                }
                break;
            }
        }
    }
    return ex;
}

// ---------------------------------------------------------------------------
// Strategy enumeration

namespace {

struct Menu {
    SlotKey key;
    std::size_t message_line;  // == key.first
    std::vector<SlotChoice> candidates;  // non-Original only
};

std::vector<Menu> build_menus(const plan::ExecutablePlan& plan, const Execution& baseline,
                              const Options& opts) {
    std::vector<Menu> menus;
    KnowledgeBase probe_kb;
    Deriver probe(probe_kb, opts.derivation_budget);

    // Knowledge the attacker holds before each message, replayed from the
    // baseline run in plan order.
    std::vector<const plan::Step*> sends;
    for (const auto& step : plan.steps)
        if (step.kind == plan::Step::Kind::Send) sends.push_back(&step);
    std::sort(sends.begin(), sends.end(), [](const plan::Step* a, const plan::Step* b) {
        return a->message_index < b->message_index;
    });

    // Leaks in plan order, so forging candidacy can respect position.
    std::size_t event_cursor = 0;

    for (const plan::Step* send : sends) {
        // Advance baseline events up to (not including) this message.
        while (event_cursor < baseline.events.size()) {
            const TraceEvent& ev = baseline.events[event_cursor];
            if (ev.kind != TraceEvent::Kind::Leak &&
                ev.message_index >= static_cast<int>(send->message_index))
                break;
            if (ev.kind == TraceEvent::Kind::Leak || ev.kind == TraceEvent::Kind::Observe)
                probe_kb.add(ev.t, ev.phase);
            ++event_cursor;
        }
        probe.saturate(send->phase);

        for (std::size_t sl = 0; sl < send->slots.size(); ++sl) {
            if (send->slots[sl].guarded) continue;
            SlotKey key{send->message_index, sl};
            auto wire_it = baseline.wire.find(key);
            if (wire_it == baseline.wire.end()) continue;  // undelivered in baseline
            const Term& original = wire_it->second.first;

            Menu menu;
            menu.key = key;
            menu.message_line = send->message_index;
            menu.candidates.push_back({SlotChoice::Kind::Fresh, 0, 0});
            menu.candidates.push_back({SlotChoice::Kind::Pubkey, 0, 0});

            Term forged = forge_term(original, probe, send->phase, {},
                                     slot_nonce(send->message_index, sl));
            if (!term::equal(forged, original) && !term::equal(forged, attacker_pubkey()) &&
                forged->kind != Kind::AttackerValue)
                menu.candidates.push_back({SlotChoice::Kind::Forge, 0, 0});

            // Earlier observed terms with the same top-level shape.
            std::vector<Term> seen;
            for (const auto& [src_key, pair] : baseline.wire) {
                if (src_key.first >= send->message_index) continue;
                const Term& cand = pair.first;
                if (cand->kind != original->kind) continue;
                if (term::equal(cand, original)) continue;
                if (std::any_of(seen.begin(), seen.end(),
                                [&](const Term& s) { return term::equal(s, cand); }))
                    continue;
                seen.push_back(cand);
                menu.candidates.push_back(
                    {SlotChoice::Kind::Replay, src_key.first, src_key.second});
            }
            menus.push_back(std::move(menu));
        }
    }
    return menus;
}

void enumerate_combinations(const std::vector<Menu>& menus, int max_mutations,
                            std::vector<MutationStrategy>& out, std::size_t cap) {
    // Strategies ordered by mutation count, then slot positions, then
    // candidate order: enumeration order equals trace-minimality order.
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t, MutationStrategy&)> rec = [&](std::size_t start,
                                                                  MutationStrategy& strat) {
        if (out.size() > cap) return;
        if (!strat.choices.empty()) out.push_back(strat);
        if (static_cast<int>(strat.choices.size()) >= max_mutations) return;
        for (std::size_t i = start; i < menus.size(); ++i) {
            for (const auto& cand : menus[i].candidates) {
                strat.choices[menus[i].key] = cand;
                rec(i + 1, strat);
                strat.choices.erase(menus[i].key);
                if (out.size() > cap) return;
            }
        }
    };
    MutationStrategy empty;
    rec(0, empty);
}

}  // namespace

std::vector<Execution> explore(const plan::ExecutablePlan& plan, dsl::AttackerMode mode,
                               const Options& opts) {
    std::vector<Execution> executions;
    MutationStrategy original;
    executions.push_back(run_execution(plan, original, opts));
    if (mode == dsl::AttackerMode::Passive) return executions;

    auto menus = build_menus(plan, executions.front(), opts);

    // Count before materializing; the cap guards the whole cross product.
    double count = 0;
    std::function<double(std::size_t, int)> count_rec = [&](std::size_t start, int left) -> double {
        if (left == 0) return 0;
        double total = 0;
        for (std::size_t i = start; i < menus.size(); ++i) {
            double c = static_cast<double>(menus[i].candidates.size());
            total += c * (1 + count_rec(i + 1, left - 1));
        }
        return total;
    };
    count = count_rec(0, opts.max_mutations);
    if (count + 1 > static_cast<double>(opts.strategy_cap)) {
        std::vector<std::size_t> lines;
        for (const auto& m : menus)
            if (lines.empty() || lines.back() != m.message_line)
                lines.push_back(m.message_line);
        std::ostringstream os;
        os << "active-attacker strategy space (" << static_cast<std::size_t>(count + 1)
           << ") exceeds cap (" << opts.strategy_cap << "); message lines involved:";
        for (auto l : lines) os << ' ' << l;
        throw StrategyCapError(os.str(), lines);
    }

    std::vector<MutationStrategy> strategies;
    enumerate_combinations(menus, opts.max_mutations, strategies, opts.strategy_cap);

    // Enumeration yields prefixes before extensions; order by mutation count
    // while keeping the lexicographic slot order within each count.
    std::stable_sort(strategies.begin(), strategies.end(),
                     [](const MutationStrategy& a, const MutationStrategy& b) {
                         return a.mutation_count() < b.mutation_count();
                     });

    executions.reserve(strategies.size() + 1);
    for (const auto& strat : strategies) executions.push_back(run_execution(plan, strat, opts));
    return executions;
}

// ---------------------------------------------------------------------------
// Queries

namespace {

/// The step that first binds `name`, along with its principal.
const plan::Step* defining_step(const plan::ExecutablePlan& plan, const std::string& name) {
    for (const auto& step : plan.steps) {
        if (step.kind == plan::Step::Kind::Generate || step.kind == plan::Step::Kind::Compute) {
            for (const auto& n : step.names)
                if (n == name) return &step;
        }
    }
    return nullptr;
}

Verdict check_confidentiality(const plan::ExecutablePlan& plan,
                              const std::vector<Execution>& executions, const dsl::Query& query,
                              const Options& opts) {
    Verdict verdict;
    verdict.query = query;
    const plan::Step* def = defining_step(plan, query.ident);
    if (!def) return verdict;  // validated models always have a definer

    for (const auto& ex : executions) {
        auto pit = ex.bindings.find(def->principal);
        if (pit == ex.bindings.end()) continue;
        auto bit = pit->second.find(query.ident);
        if (bit == pit->second.end()) continue;
        const Term& goal = bit->second;

        KnowledgeBase kb = ex.kb;
        Deriver deriver(kb, opts.derivation_budget);
        deriver.saturate(ex.final_phase);
        if (auto proof = deriver.derive(goal, ex.final_phase)) {
            verdict.violated = true;
            verdict.trace = ex.events;
            verdict.trace.push_back(TraceEvent{TraceEvent::Kind::Derive, -1, query.ident, goal,
                                               ex.final_phase, ""});
            verdict.derivation = proof;
            verdict.strategy = ex.strategy;
            return verdict;
        }
    }
    return verdict;
}

Verdict check_authentication(const plan::ExecutablePlan& plan,
                             const std::vector<Execution>& executions, const dsl::Query& query,
                             const Options&) {
    Verdict verdict;
    verdict.query = query;

    // The message line this query talks about.
    const plan::Step* send = nullptr;
    std::size_t send_step_index = 0;
    std::size_t slot_index = 0;
    for (std::size_t si = 0; si < plan.steps.size() && !send; ++si) {
        const auto& step = plan.steps[si];
        if (step.kind != plan::Step::Kind::Send || step.principal != query.sender ||
            step.receiver != query.receiver)
            continue;
        for (std::size_t sl = 0; sl < step.slots.size(); ++sl) {
            if (step.slots[sl].name == query.ident) {
                send = &step;
                send_step_index = si;
                slot_index = sl;
                break;
            }
        }
    }
    if (!send) return verdict;

    const Execution& honest = executions.front();

    for (const auto& ex : executions) {
        auto wire_it = ex.wire.find({send->message_index, slot_index});
        if (wire_it == ex.wire.end()) continue;
        const auto& [sent, delivered] = wire_it->second;

        // The receiver accepts the value when at least one operation
        // consuming it (or something computed from it) succeeds and no
        // checked operation consuming it fails. A failing consuming check
        // means the receiver detected tampering and the value is rejected.
        std::set<std::string> tainted = {query.ident};
        bool accepted = false;
        bool accepted_bad = false;
        bool rejected = false;
        for (std::size_t si = send_step_index + 1; si < plan.steps.size() && !rejected; ++si) {
            const auto& step = plan.steps[si];
            if (step.kind != plan::Step::Kind::Compute || step.principal != query.receiver)
                continue;
            const StepRecord& rec = ex.records[si];
            if (!rec.executed) continue;

            std::set<std::string> refs;
            collect_idents(*step.expr, refs);
            bool consumes = std::any_of(refs.begin(), refs.end(), [&](const std::string& n) {
                return tainted.count(n) > 0;
            });
            if (!consumes) continue;

            if (!rec.success) {
                rejected = true;
                break;
            }
            accepted = true;
            bool injected = !term::equal(delivered, sent);
            const StepRecord& href = honest.records[si];
            bool influenced = href.executed && href.success && rec.args != href.args;
            accepted_bad = accepted_bad || injected || influenced;
            for (const auto& t : step.names) tainted.insert(t);
        }
        if (accepted && accepted_bad && !rejected) {
            verdict.violated = true;
            verdict.trace = ex.events;
            verdict.strategy = ex.strategy;
            return verdict;
        }
    }
    return verdict;
}

}  // namespace

Verdict check_query(const plan::ExecutablePlan& plan, const std::vector<Execution>& executions,
                    const dsl::Query& query, const Options& opts) {
    if (query.kind == dsl::Query::Kind::Confidentiality)
        return check_confidentiality(plan, executions, query, opts);
    return check_authentication(plan, executions, query, opts);
}

std::vector<Verdict> analyze(const dsl::ModelAST& ast, const Options& opts) {
    auto diagnostics = dsl::validate(ast);
    if (!diagnostics.empty()) throw AnalysisError("validate", format(diagnostics));

    plan::ExecutablePlan p;
    try {
        p = plan::compile(ast);
    } catch (const plan::CompileError& e) {
        throw AnalysisError("compile", e.what());
    }

    dsl::AttackerMode mode = opts.attacker_override.value_or(ast.attacker_mode);
    try {
        std::vector<Execution> executions = explore(p, mode, opts);
        std::vector<Verdict> verdicts;
        verdicts.reserve(p.queries.size());
        for (const auto& q : p.queries) verdicts.push_back(check_query(p, executions, q, opts));
        return verdicts;
    } catch (const term::TermError& e) {
        // e.g. a model whose computations blow the term depth bound
        throw AnalysisError("execute", e.what());
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json derivation_json(const DerivationNode& n) {
    nlohmann::json j;
    j["rule"] = n.rule;
    j["term"] = term::render(n.t);
    j["children"] = nlohmann::json::array();
    for (const auto& c : n.children) j["children"].push_back(derivation_json(*c));
    return j;
}

}  // namespace

std::string verdict_to_json(const std::string& model_name, const Verdict& verdict) {
    nlohmann::json j;
    j["model"] = model_name;
    j["query"] = dsl::to_string(verdict.query);
    j["result"] = verdict.violated ? "violated" : "proved";
    j["events"] = nlohmann::json::array();
    for (const auto& ev : verdict.trace) {
        nlohmann::json e;
        e["kind"] = to_string(ev.kind);
        e["message_index"] = ev.message_index;
        e["slot"] = ev.slot;
        e["term_rendered"] = term::render(ev.t);
        e["phase"] = ev.phase;
        j["events"].push_back(std::move(e));
    }
    j["derivation"] = verdict.derivation ? derivation_json(*verdict.derivation)
                                         : nlohmann::json(nullptr);
    return j.dump(2);
}

}  // namespace dyw::engine
