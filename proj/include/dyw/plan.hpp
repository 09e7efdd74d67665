// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_PLAN_HPP_
#define DYW_PLAN_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyw/dsl.hpp"

namespace dyw::plan {

class CompileError : public std::runtime_error {
public:
    CompileError(SourceLoc loc, const std::string& what)
        : std::runtime_error(to_string(loc) + ": " + what), loc(loc) {}
    SourceLoc loc;
};

/// One executable step. A message line compiles to a single Send step: the
/// attacker intercepts in the middle, so delivery and receipt are one event.
struct Step {
    enum class Kind { Generate, Compute, Send, Leak, Phase };

    Kind kind;
    int phase = 0;
    SourceLoc loc;

    std::string principal;           // Generate/Compute/Leak owner, Send sender
    std::vector<std::string> names;  // Generate: one name; Compute: targets; Leak: names

    // Compute
    dsl::ExprPtr expr;
    bool checked = false;  // AEAD_DEC / SIGNVERIF abort the principal on failure

    // Knows statements become Generate-like binding steps with `knows` set.
    bool knows = false;
    bool knows_public = false;

    // Send
    std::string receiver;
    std::vector<dsl::Slot> slots;
    std::size_t message_index = 0;

    // Phase
    int new_phase = 0;
};

struct ExecutablePlan {
    std::vector<Step> steps;
    std::vector<dsl::Query> queries;
    dsl::AttackerMode attacker_mode = dsl::AttackerMode::Passive;
    std::size_t message_count = 0;
    int max_phase = 0;
};

/// Lowers a validated model to its step list. Throws CompileError on arity
/// mismatches the validator would also have flagged.
ExecutablePlan compile(const dsl::ModelAST& ast);

}  // namespace dyw::plan

#endif  // DYW_PLAN_HPP_
