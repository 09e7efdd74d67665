// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_DSL_HPP_
#define DYW_DSL_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyw/diagnostics.hpp"

namespace dyw::dsl {

enum class AttackerMode { Active, Passive };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Right-hand side of an assignment: identifiers, primitive calls, and the
/// exponentiation operator. `G^x` is just Pow(Ident("G"), Ident("x")).
struct Expr {
    enum class Kind { Ident, Call, Pow };
    Kind kind;
    SourceLoc loc;

    std::string name;  // Ident name or Call primitive name
    std::vector<ExprPtr> args;
    ExprPtr lhs, rhs;  // Pow
};

ExprPtr make_ident(std::string name, SourceLoc loc);
ExprPtr make_call(std::string name, std::vector<ExprPtr> args, SourceLoc loc);
ExprPtr make_pow(ExprPtr lhs, ExprPtr rhs, SourceLoc loc);

struct Statement {
    enum class Kind { Generates, Knows, Assignment, Leaks };
    enum class Visibility { Public, Private };

    Kind kind;
    SourceLoc loc;
    Visibility visibility = Visibility::Private;  // Knows only
    std::vector<std::string> names;               // generated/known/leaked names or targets
    ExprPtr expr;  // Assignment; a bare checked call is an Assignment with no targets
};

struct PrincipalBlock {
    std::string name;
    std::vector<Statement> statements;
    SourceLoc loc;
};

struct Slot {
    std::string name;
    bool guarded = false;
    SourceLoc loc;
};

struct MessageLine {
    std::string sender;
    std::string receiver;
    std::vector<Slot> slots;
    SourceLoc loc;
};

struct PhaseMarker {
    int phase = 0;
    SourceLoc loc;
};

using Item = std::variant<PrincipalBlock, MessageLine, PhaseMarker>;

struct Query {
    enum class Kind { Confidentiality, Authentication };
    Kind kind;
    std::string ident;
    std::string sender;    // Authentication only
    std::string receiver;  // Authentication only
    SourceLoc loc;
};

std::string to_string(const Query& q);

struct ModelAST {
    AttackerMode attacker_mode = AttackerMode::Passive;
    std::vector<Item> items;
    std::vector<Query> queries;
};

struct ParseResult {
    std::optional<ModelAST> ast;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return ast.has_value() && diagnostics.empty(); }
};

/// Parses a model document. Never throws on malformed input: either an AST
/// or at least one diagnostic comes back.
ParseResult parse(std::string_view source);

/// Static checks beyond the grammar: definition before use, single
/// definition, increasing phases, query well-formedness, primitive arities.
/// Empty result means the model is ready to compile.
std::vector<Diagnostic> validate(const ModelAST& ast);

/// Renders an AST back to model-language text; parsing the result yields a
/// structurally equal AST.
std::string pretty_print(const ModelAST& ast);

bool structurally_equal(const ModelAST& a, const ModelAST& b);

}  // namespace dyw::dsl

#endif  // DYW_DSL_HPP_
