// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>
#include <vector>

#include "dyw/corpus.hpp"
#include "dyw/dsl.hpp"
#include "dyw/plan.hpp"

using namespace dyw;
using plan::Step;

TEST_CASE("3DH example lowers to the expected step sequence") {
    auto parsed = dsl::parse(*corpus::embedded_file("models/threedh_example.dym"));
    REQUIRE(parsed.ok());
    auto p = plan::compile(*parsed.ast);

    // Counted by hand from the model source: Alice generates two values and
    // computes two public keys; Bob generates three values (two keys and the
    // message) around seven computes; Alice finishes with five computes.
    // One send step per message line.
    std::vector<Step::Kind> expected = {
        Step::Kind::Generate, Step::Kind::Generate, Step::Kind::Compute, Step::Kind::Compute,
        Step::Kind::Send,
        Step::Kind::Generate, Step::Kind::Generate, Step::Kind::Compute, Step::Kind::Compute,
        Step::Kind::Compute,  Step::Kind::Compute,  Step::Kind::Compute, Step::Kind::Compute,
        Step::Kind::Generate, Step::Kind::Compute,
        Step::Kind::Send,
        Step::Kind::Compute,  Step::Kind::Compute,  Step::Kind::Compute, Step::Kind::Compute,
        Step::Kind::Compute,
    };
    REQUIRE(p.steps.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(p.steps[i].kind == expected[i]);

    CHECK(p.message_count == 2);
    CHECK(p.max_phase == 0);
    CHECK(p.queries.size() == 2);

    // Bob's block: 7 computes, 3 generates.
    int bob_computes = 0, bob_generates = 0;
    for (const auto& s : p.steps) {
        if (s.principal != "Bob") continue;
        if (s.kind == Step::Kind::Compute) ++bob_computes;
        if (s.kind == Step::Kind::Generate) ++bob_generates;
    }
    CHECK(bob_computes == 7);
    CHECK(bob_generates == 3);
}

TEST_CASE("phase markers split the plan") {
    auto parsed = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates a\n"
        "]\n"
        "phase[1]\n"
        "principal Alice[\n"
        "  leaks a\n"
        "]\n");
    REQUIRE(parsed.ok());
    auto p = plan::compile(*parsed.ast);
    REQUIRE(p.steps.size() == 3);
    CHECK(p.steps[0].kind == Step::Kind::Generate);
    CHECK(p.steps[0].phase == 0);
    CHECK(p.steps[1].kind == Step::Kind::Phase);
    CHECK(p.steps[2].kind == Step::Kind::Leak);
    CHECK(p.steps[2].phase == 1);
    CHECK(p.max_phase == 1);
}

TEST_CASE("checked operations are flagged") {
    auto parsed = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates k, m, ad\n"
        "  c = AEAD_ENC(k, m, ad)\n"
        "  d = AEAD_DEC(k, c, ad)\n"
        "  s = SIGN(k, m)\n"
        "  SIGNVERIF(G^k, m, s)\n"
        "  p = DEC(k, ENC(k, m))\n"
        "]\n");
    REQUIRE(parsed.ok());
    auto p = plan::compile(*parsed.ast);
    int checked = 0;
    for (const auto& s : p.steps)
        if (s.kind == Step::Kind::Compute && s.checked) ++checked;
    CHECK(checked == 2);  // AEAD_DEC and SIGNVERIF only
}

TEST_CASE("multi-output arity mismatch is a compile error") {
    dsl::ModelAST ast;
    ast.attacker_mode = dsl::AttackerMode::Active;
    dsl::PrincipalBlock block;
    block.name = "Alice";
    dsl::Statement gen;
    gen.kind = dsl::Statement::Kind::Generates;
    gen.names = {"x"};
    block.statements.push_back(gen);
    dsl::Statement bad;
    bad.kind = dsl::Statement::Kind::Assignment;
    bad.names = {"a", "b"};
    bad.expr = dsl::make_call("HASH", {dsl::make_ident("x", {})}, {});
    block.statements.push_back(bad);
    ast.items.emplace_back(std::move(block));
    CHECK_THROWS_AS(plan::compile(ast), plan::CompileError);
}
