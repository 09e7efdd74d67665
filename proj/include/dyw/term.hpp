// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_TERM_HPP_
#define DYW_TERM_HPP_

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace dyw::term {

/// Which constructor built a term.
enum class Kind {
    PublicConstant,
    FreshValue,
    AttackerValue,
    Exp,
    Prim,
    Tuple,
    Projection,
};

enum class Prim {
    HASH,
    HKDF,
    MAC,
    HMAC,
    RATCHET,
    ENC,
    DEC,
    AEAD_ENC,
    AEAD_DEC,
    SIGN,
    SIGNVERIF,
    PK,
};

const char* prim_name(Prim p);

/// Maps an upper-case primitive spelling to its tag; nullptr-like failure is
/// reported through the bool.
bool lookup_prim(const std::string& name, Prim& out);

/// Number of arguments a primitive accepts. min==0 means "at least one,
/// any number" (the free hash family).
struct PrimArity {
    std::size_t min;
    std::size_t max;  // == min for fixed arity, SIZE_MAX for variadic
};
PrimArity prim_arity(Prim p);

class TermNode;
using Term = std::shared_ptr<const TermNode>;

/// Immutable, interned, canonical symbolic value. Construction applies the
/// rewrite system to fixpoint, so two semantically equal terms are always
/// the same pointer.
class TermNode {
public:
    Kind kind;

    // PublicConstant / FreshValue / AttackerValue
    std::string name;
    std::string principal;  // FreshValue owner; empty for shared secrets
    int phase = 0;          // creation phase for fresh/attacker values

    // Prim
    Prim prim = Prim::HASH;

    // Projection
    std::size_t index = 0;

    // Exp base (never itself an Exp) / Projection source
    Term base;

    // Prim args / Tuple elements / Exp exponents (sorted, with multiplicity)
    std::vector<Term> children;

    std::size_t hash = 0;
    int depth = 1;
    int node_count = 1;
};

/// A term above this depth is rejected at construction time.
inline constexpr int kDepthBound = 64;

class TermError : public std::runtime_error {
public:
    explicit TermError(const std::string& what) : std::runtime_error(what) {}
};

// -- Constructors (canonicalizing, interned) --------------------------------

Term constant(const std::string& name);
Term fresh(const std::string& principal, const std::string& name, int phase);
Term attacker_value(const std::string& name, int phase);
Term exp(const Term& base, const Term& exponent);
Term prim(Prim p, std::vector<Term> args);
Term tuple(std::vector<Term> elems);
Term projection(std::size_t index, const Term& source);

/// The Diffie-Hellman generator.
Term generator();
/// The result a satisfied SIGNVERIF reduces to.
Term true_constant();

// -- Operations --------------------------------------------------------------

/// Re-canonicalizes a term bottom-up. Construction already yields canonical
/// forms, so this is the identity on any term produced by this module.
Term normalize(const Term& t);

/// Structural equality of canonical forms. Interning makes this a pointer
/// comparison.
inline bool equal(const Term& a, const Term& b) { return a.get() == b.get(); }

/// Total order used for exponent sorting and anywhere determinism matters:
/// lexicographic on (kind, primitive name, identity, children).
int compare(const Term& a, const Term& b);

/// All transitively contained terms, including t itself.
std::unordered_set<Term> subterms(const Term& t);

/// Canonical textual rendering: NAME(args...) for primitives, G^{e1,e2}
/// for exponentials, (a, b) for tuples, src[i] for projections.
std::string render(const Term& t);

inline int size(const Term& t) { return t->node_count; }
inline int depth(const Term& t) { return t->depth; }

struct TermHash {
    std::size_t operator()(const Term& t) const { return t->hash; }
};

struct TermLess {
    bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

}  // namespace dyw::term

#endif  // DYW_TERM_HPP_
