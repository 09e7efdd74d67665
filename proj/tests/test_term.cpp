// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <vector>

#include "dyw/term.hpp"

using namespace dyw::term;

namespace {

// Random canonical terms for the property checks.
Term random_term(std::mt19937_64& rng, int budget) {
    static const std::vector<Term> atoms = {
        generator(),
        constant("c1"),
        constant("c2"),
        fresh("Alice", "a", 0),
        fresh("Alice", "b", 0),
        fresh("Bob", "k", 0),
        fresh("Bob", "m", 1),
        attacker_value("mal", 0),
    };
    if (budget <= 1) return atoms[rng() % atoms.size()];
    switch (rng() % 7) {
        case 0:
            return exp(random_term(rng, budget / 2), random_term(rng, budget / 2));
        case 1:
            return prim(Prim::HASH, {random_term(rng, budget / 2), random_term(rng, budget / 2)});
        case 2: {
            Term k = random_term(rng, budget / 2);
            Term m = random_term(rng, budget / 2);
            return rng() % 2 ? prim(Prim::ENC, {k, m}) : prim(Prim::DEC, {k, m});
        }
        case 3:
            return prim(Prim::AEAD_ENC, {random_term(rng, budget / 3),
                                         random_term(rng, budget / 3),
                                         random_term(rng, budget / 3)});
        case 4:
            return tuple({random_term(rng, budget / 2), random_term(rng, budget / 2)});
        case 5:
            return projection(rng() % 2, random_term(rng, budget / 2));
        default:
            return prim(Prim::SIGN, {random_term(rng, budget / 2), random_term(rng, budget / 2)});
    }
}

}  // namespace

TEST_CASE("DH exponent order does not matter") {
    Term a = fresh("Alice", "a", 0);
    Term b = fresh("Bob", "b", 0);
    Term g = generator();
    Term gab = exp(exp(g, a), b);
    Term gba = exp(exp(g, b), a);
    CHECK(equal(gab, gba));
    CHECK(gab->kind == Kind::Exp);
    CHECK(gab->children.size() == 2);
    CHECK(equal(gab->base, g));
}

TEST_CASE("random exponent permutations normalize identically") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 200; ++round) {
        std::vector<Term> exps;
        int n = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i)
            exps.push_back(fresh("P", "e" + std::to_string(rng() % 5), 0));
        Term t1 = generator();
        for (const auto& e : exps) t1 = exp(t1, e);
        std::shuffle(exps.begin(), exps.end(), rng);
        Term t2 = generator();
        for (const auto& e : exps) t2 = exp(t2, e);
        REQUIRE(equal(t1, t2));
    }
}

TEST_CASE("decryption inverses") {
    Term k = fresh("Alice", "k", 0);
    Term k2 = fresh("Alice", "k2", 0);
    Term m = fresh("Alice", "m", 0);
    CHECK(equal(prim(Prim::DEC, {k, prim(Prim::ENC, {k, m})}), m));

    Term stuck = prim(Prim::DEC, {k2, prim(Prim::ENC, {k, m})});
    CHECK(stuck->kind == Kind::Prim);
    CHECK(stuck->prim == Prim::DEC);

    Term ad = constant("ad");
    Term ct = prim(Prim::AEAD_ENC, {k, m, ad});
    CHECK(equal(prim(Prim::AEAD_DEC, {k, ct, ad}), m));
    Term aead_stuck = prim(Prim::AEAD_DEC, {k2, ct, ad});
    CHECK(aead_stuck->prim == Prim::AEAD_DEC);
    Term ad_stuck = prim(Prim::AEAD_DEC, {k, ct, constant("other")});
    CHECK(ad_stuck->prim == Prim::AEAD_DEC);
}

TEST_CASE("signature verification reduces to true") {
    Term sk = fresh("Bob", "sk", 0);
    Term m = fresh("Bob", "m", 0);
    Term sig = prim(Prim::SIGN, {sk, m});

    CHECK(equal(prim(Prim::SIGNVERIF, {prim(Prim::PK, {sk}), m, sig}), true_constant()));
    CHECK(equal(prim(Prim::SIGNVERIF, {exp(generator(), sk), m, sig}), true_constant()));

    Term wrong_key = prim(Prim::SIGNVERIF, {exp(generator(), m), m, sig});
    CHECK(wrong_key->kind == Kind::Prim);
    Term wrong_msg = prim(Prim::SIGNVERIF, {exp(generator(), sk), constant("other"), sig});
    CHECK(wrong_msg->kind == Kind::Prim);
}

TEST_CASE("projections reduce on tuples and stay stuck elsewhere") {
    Term a = constant("a");
    Term h = prim(Prim::HASH, {constant("b")});
    Term t = tuple({a, h});
    CHECK(equal(projection(0, t), a));
    CHECK(equal(projection(1, t), h));
    Term stuck = projection(0, prim(Prim::HKDF, {a}));
    CHECK(stuck->kind == Kind::Projection);
    CHECK(equal(projection(0, prim(Prim::HKDF, {a})), stuck));
}

TEST_CASE("free constructors stay distinct") {
    CHECK_FALSE(equal(prim(Prim::HASH, {constant("x")}), prim(Prim::HASH, {constant("y")})));
    CHECK_FALSE(equal(prim(Prim::HASH, {constant("x")}), prim(Prim::HKDF, {constant("x")})));
}

TEST_CASE("subterms") {
    Term k = fresh("A", "k", 0);
    Term m = fresh("A", "m", 0);
    Term enc = prim(Prim::ENC, {k, m});
    auto subs = subterms(enc);
    CHECK(subs.size() == 3);
    CHECK(subs.count(enc));
    CHECK(subs.count(k));
    CHECK(subs.count(m));

    CHECK(subterms(generator()).size() == 1);

    Term tup = tuple({k, prim(Prim::HASH, {m})});
    auto tsubs = subterms(tup);
    CHECK(tsubs.size() == 4);  // tuple, k, HASH(m), m
}

TEST_CASE("normalize is idempotent and never grows terms") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        Term t = random_term(rng, 12);
        Term n1 = normalize(t);
        REQUIRE(equal(n1, t));  // construction already canonicalizes
        REQUIRE(equal(normalize(n1), n1));
        REQUIRE(size(n1) <= size(t));
    }
}

TEST_CASE("equality is an equivalence relation") {
    std::mt19937_64 rng(43);
    std::vector<Term> pool;
    for (int i = 0; i < 60; ++i) pool.push_back(random_term(rng, 10));
    for (const auto& a : pool) CHECK(equal(a, a));
    for (const auto& a : pool)
        for (const auto& b : pool) {
            CHECK(equal(a, b) == equal(b, a));
            CHECK((compare(a, b) == 0) == equal(a, b));
        }
}

TEST_CASE("total order is consistent") {
    std::mt19937_64 rng(44);
    std::vector<Term> pool;
    for (int i = 0; i < 40; ++i) pool.push_back(random_term(rng, 8));
    for (const auto& a : pool)
        for (const auto& b : pool) {
            int ab = compare(a, b);
            int ba = compare(b, a);
            CHECK(((ab < 0 && ba > 0) || (ab > 0 && ba < 0) || (ab == 0 && ba == 0)));
        }
}

TEST_CASE("depth bound rejects runaway construction") {
    Term t = constant("x");
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 100; ++i) t = prim(Prim::HASH, {t});
            return t;
        }(),
        TermError);
}

TEST_CASE("rendering") {
    Term a = fresh("Alice", "a", 0);
    Term b = fresh("Bob", "b", 0);
    CHECK(render(exp(exp(generator(), b), a)) == "G^{a,b}");
    CHECK(render(prim(Prim::ENC, {a, b})) == "ENC(a, b)");
    CHECK(render(tuple({a, b})) == "(a, b)");
    CHECK(render(projection(1, prim(Prim::HKDF, {a}))) == "HKDF(a)[1]");
}
