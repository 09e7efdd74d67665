// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>

#include "dyw/corpus.hpp"
#include "dyw/dsl.hpp"

using namespace dyw;

namespace {

const std::string& fig1() {
    static const std::string src = *corpus::embedded_file("models/threedh_example.dym");
    return src;
}

}  // namespace

TEST_CASE("parses the 3DH example") {
    auto result = dsl::parse(fig1());
    REQUIRE(result.ok());
    const auto& ast = *result.ast;
    CHECK(ast.attacker_mode == dsl::AttackerMode::Active);

    int alice_blocks = 0, bob_blocks = 0, messages = 0;
    for (const auto& item : ast.items) {
        if (const auto* block = std::get_if<dsl::PrincipalBlock>(&item)) {
            if (block->name == "Alice") ++alice_blocks;
            if (block->name == "Bob") ++bob_blocks;
        } else if (std::get_if<dsl::MessageLine>(&item)) {
            ++messages;
        }
    }
    CHECK(alice_blocks == 2);
    CHECK(bob_blocks == 1);
    CHECK(messages == 2);

    // First message guards exactly its first slot.
    for (const auto& item : ast.items) {
        if (const auto* msg = std::get_if<dsl::MessageLine>(&item)) {
            REQUIRE(msg->slots.size() == 2);
            CHECK(msg->slots[0].guarded);
            CHECK(msg->slots[0].name == "alice_public");
            CHECK_FALSE(msg->slots[1].guarded);
            break;
        }
    }

    REQUIRE(ast.queries.size() == 2);
    CHECK(ast.queries[0].kind == dsl::Query::Kind::Confidentiality);
    CHECK(ast.queries[0].ident == "mb");
    CHECK(ast.queries[1].kind == dsl::Query::Kind::Authentication);
    CHECK(ast.queries[1].sender == "Bob");
    CHECK(ast.queries[1].receiver == "Alice");
    CHECK(ast.queries[1].ident == "e");

    CHECK(dsl::validate(ast).empty());
}

TEST_CASE("minimal document") {
    auto result = dsl::parse("attacker[passive]");
    REQUIRE(result.ok());
    CHECK(result.ast->attacker_mode == dsl::AttackerMode::Passive);
    CHECK(result.ast->items.empty());
    CHECK(result.ast->queries.empty());
}

TEST_CASE("unclosed block is a syntax error at end of input") {
    std::string broken = fig1();
    std::size_t last = broken.rfind(']');
    REQUIRE(last != std::string::npos);
    broken.erase(last, 1);
    auto result = dsl::parse(broken);
    CHECK_FALSE(result.ast.has_value());
    REQUIRE_FALSE(result.diagnostics.empty());
    CHECK(result.diagnostics[0].message.find("unclosed") != std::string::npos);
    CHECK(result.diagnostics[0].loc.line >= 40);  // at the end of the document
}

TEST_CASE("diagnostics carry 1-based positions inside the document") {
    auto result = dsl::parse("attacker[active]\nprincipal A[\n  x = \n]");
    CHECK_FALSE(result.ok());
    REQUIRE_FALSE(result.diagnostics.empty());
    auto loc = result.diagnostics[0].loc;
    CHECK(loc.line >= 1);
    CHECK(loc.line <= 4);
    CHECK(loc.column >= 1);
}

TEST_CASE("use before definition") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  k = HASH(bob_public)\n"
        "]\n"
        "principal Bob[\n"
        "  generates bob_private\n"
        "  bob_public = G^bob_private\n"
        "]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].message.find("before") != std::string::npos);
    CHECK(diags[0].loc.line == 3);
}

TEST_CASE("unknown identifier in query") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates x\n"
        "]\n"
        "queries[\n"
        "  confidentiality? zz\n"
        "]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("unknown identifier in query") != std::string::npos);
}

TEST_CASE("authentication query needs a matching message") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates x\n"
        "]\n"
        "Alice -> Bob: x\n"
        "queries[\n"
        "  authentication? Bob -> Alice: x\n"
        "]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("never sent") != std::string::npos);
}

TEST_CASE("double generation is rejected") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates x\n"
        "]\n"
        "principal Bob[\n"
        "  generates x\n"
        "]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].message.find("already defined") != std::string::npos);
}

TEST_CASE("shared knows is allowed across principals") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  knows private ok\n"
        "]\n"
        "principal Bob[\n"
        "  knows private ok\n"
        "]\n");
    REQUIRE(result.ok());
    CHECK(dsl::validate(*result.ast).empty());
}

TEST_CASE("multi-output only for HKDF") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates x\n"
        "  a, b = HASH(x)\n"
        "]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].message.find("arity mismatch") != std::string::npos);

    auto ok = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates x\n"
        "  a, b = HKDF(x)\n"
        "]\n");
    REQUIRE(ok.ok());
    CHECK(dsl::validate(*ok.ast).empty());
}

TEST_CASE("phase markers must increase") {
    auto result = dsl::parse("attacker[active]\nphase[1]\nphase[1]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].message.find("strictly increase") != std::string::npos);
}

TEST_CASE("primitive arity is validated") {
    auto result = dsl::parse(
        "attacker[active]\n"
        "principal Alice[\n"
        "  generates k\n"
        "  c = ENC(k)\n"
        "]\n");
    REQUIRE(result.ok());
    auto diags = dsl::validate(*result.ast);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].message.find("argument") != std::string::npos);
}

TEST_CASE("pretty-print round trip is structurally equal") {
    for (const auto& entry : corpus::corpus()) {
        auto first = dsl::parse(entry.source);
        REQUIRE(first.ok());
        auto printed = dsl::pretty_print(*first.ast);
        auto second = dsl::parse(printed);
        REQUIRE(second.ok());
        CHECK(dsl::structurally_equal(*first.ast, *second.ast));
    }
}

TEST_CASE("parser survives random byte inputs") {
    std::mt19937_64 rng(0xfa11);
    for (int round = 0; round < 3000; ++round) {
        std::size_t len = rng() % 200;
        std::string input;
        for (std::size_t i = 0; i < len; ++i)
            input.push_back(static_cast<char>(rng() % 256));
        auto result = dsl::parse(input);
        CHECK((result.ast.has_value() || !result.diagnostics.empty()));
        std::size_t lines = 1 + std::count(input.begin(), input.end(), '\n');
        for (const auto& d : result.diagnostics) {
            CHECK(d.loc.line >= 1);
            CHECK(d.loc.line <= lines);
            CHECK(d.loc.column >= 1);
        }
    }
}

TEST_CASE("parser survives mutated model text") {
    std::mt19937_64 rng(0xbadc0de);
    const std::string& base = fig1();
    for (int round = 0; round < 2000; ++round) {
        std::string input = base;
        int edits = 1 + static_cast<int>(rng() % 8);
        for (int e = 0; e < edits; ++e) {
            std::size_t pos = rng() % input.size();
            switch (rng() % 3) {
                case 0: input[pos] = static_cast<char>(rng() % 256); break;
                case 1: input.erase(pos, 1); break;
                default: input.insert(pos, 1, static_cast<char>(rng() % 128)); break;
            }
            if (input.empty()) input = "x";
        }
        auto result = dsl::parse(input);
        CHECK((result.ast.has_value() || !result.diagnostics.empty()));
    }
}
