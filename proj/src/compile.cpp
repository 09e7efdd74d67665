// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "dyw/plan.hpp"

#include <sstream>

namespace dyw::plan {

ExecutablePlan compile(const dsl::ModelAST& ast) {
    ExecutablePlan plan;
    plan.attacker_mode = ast.attacker_mode;
    plan.queries = ast.queries;

    int phase = 0;
    for (const auto& item : ast.items) {
        if (const auto* block = std::get_if<dsl::PrincipalBlock>(&item)) {
            for (const auto& st : block->statements) {
                Step step;
                step.phase = phase;
                step.loc = st.loc;
                step.principal = block->name;
                switch (st.kind) {
                    case dsl::Statement::Kind::Generates:
                        step.kind = Step::Kind::Generate;
                        for (const auto& n : st.names) {
                            Step s = step;
                            s.names = {n};
                            plan.steps.push_back(std::move(s));
                        }
                        break;
                    case dsl::Statement::Kind::Knows:
                        step.kind = Step::Kind::Generate;
                        step.knows = true;
                        step.knows_public =
                            st.visibility == dsl::Statement::Visibility::Public;
                        for (const auto& n : st.names) {
                            Step s = step;
                            s.names = {n};
                            plan.steps.push_back(std::move(s));
                        }
                        break;
                    case dsl::Statement::Kind::Leaks:
                        step.kind = Step::Kind::Leak;
                        step.names = st.names;
                        plan.steps.push_back(std::move(step));
                        break;
                    case dsl::Statement::Kind::Assignment: {
                        step.kind = Step::Kind::Compute;
                        step.names = st.names;
                        step.expr = st.expr;
                        bool is_call = st.expr->kind == dsl::Expr::Kind::Call;
                        step.checked = is_call && (st.expr->name == "AEAD_DEC" ||
                                                   st.expr->name == "SIGNVERIF");
                        if (st.names.size() > 1 && !(is_call && st.expr->name == "HKDF")) {
                            std::ostringstream os;
                            os << "arity mismatch in multi-output assignment: "
                               << st.names.size() << " targets but '"
                               << (is_call ? st.expr->name : std::string("expression"))
                               << "' yields one output";
                            throw CompileError(st.loc, os.str());
                        }
                        plan.steps.push_back(std::move(step));
                        break;
                    }
                }
            }
        } else if (const auto* msg = std::get_if<dsl::MessageLine>(&item)) {
            Step step;
            step.kind = Step::Kind::Send;
            step.phase = phase;
            step.loc = msg->loc;
            step.principal = msg->sender;
            step.receiver = msg->receiver;
            step.slots = msg->slots;
            step.message_index = plan.message_count++;
            plan.steps.push_back(std::move(step));
        } else if (const auto* marker = std::get_if<dsl::PhaseMarker>(&item)) {
            Step step;
            step.kind = Step::Kind::Phase;
            step.phase = phase;
            step.loc = marker->loc;
            step.new_phase = marker->phase;
            plan.steps.push_back(std::move(step));
            phase = marker->phase;
        }
    }
    plan.max_phase = phase;
    return plan;
}

}  // namespace dyw::plan
