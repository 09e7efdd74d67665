// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "dyw/term.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace dyw::term {

namespace {

const char* const kPrimNames[] = {
    "HASH", "HKDF", "MAC",  "HMAC",     "RATCHET",   "ENC",
    "DEC",  "AEAD_ENC", "AEAD_DEC", "SIGN", "SIGNVERIF", "PK",
};

std::size_t mix(std::size_t seed, std::size_t v) {
    // boost::hash_combine
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_node(const TermNode& n) {
    std::size_t h = static_cast<std::size_t>(n.kind);
    h = mix(h, std::hash<std::string>{}(n.name));
    h = mix(h, std::hash<std::string>{}(n.principal));
    h = mix(h, static_cast<std::size_t>(n.phase));
    h = mix(h, static_cast<std::size_t>(n.prim));
    h = mix(h, n.index);
    h = mix(h, n.base ? n.base->hash : 0);
    for (const auto& c : n.children) h = mix(h, c->hash);
    return h;
}

bool same_structure(const TermNode& a, const TermNode& b) {
    if (a.kind != b.kind || a.name != b.name || a.principal != b.principal ||
        a.phase != b.phase || a.prim != b.prim || a.index != b.index)
        return false;
    if ((a.base == nullptr) != (b.base == nullptr)) return false;
    if (a.base && a.base.get() != b.base.get()) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (a.children[i].get() != b.children[i].get()) return false;
    return true;
}

// Interner. Children of a candidate node are already interned, so structural
// comparison degenerates to pointer comparisons. Synchronized: terms are
// shared freely between workers.
class Interner {
public:
    Term intern(TermNode&& n) {
        n.hash = hash_node(n);
        n.depth = 1;
        n.node_count = 1;
        if (n.base) {
            n.depth = std::max(n.depth, n.base->depth + 1);
            n.node_count += n.base->node_count;
        }
        for (const auto& c : n.children) {
            n.depth = std::max(n.depth, c->depth + 1);
            n.node_count += c->node_count;
        }
        std::lock_guard<std::mutex> lock(mu_);
        auto range = table_.equal_range(n.hash);
        for (auto it = range.first; it != range.second; ++it)
            if (same_structure(*it->second, n)) return it->second;
        auto node = std::make_shared<TermNode>(std::move(n));
        table_.emplace(node->hash, node);
        return node;
    }

private:
    std::mutex mu_;
    std::unordered_multimap<std::size_t, Term> table_;
};

Interner& interner() {
    static Interner in;
    return in;
}

void check_depth(const TermNode& n, const char* what) {
    int d = 1;
    if (n.base) d = std::max(d, n.base->depth + 1);
    for (const auto& c : n.children) d = std::max(d, c->depth + 1);
    if (d > kDepthBound) {
        std::ostringstream os;
        os << "term depth bound (" << kDepthBound << ") exceeded while building " << what;
        if (n.base)
            os << "; offending subterm: " << render(n.base);
        else if (!n.children.empty())
            os << "; offending subterm: " << render(n.children.front());
        throw TermError(os.str());
    }
}

Term intern_checked(TermNode&& n, const char* what) {
    check_depth(n, what);
    return interner().intern(std::move(n));
}

}  // namespace

const char* prim_name(Prim p) { return kPrimNames[static_cast<int>(p)]; }

bool lookup_prim(const std::string& name, Prim& out) {
    for (int i = 0; i < static_cast<int>(sizeof(kPrimNames) / sizeof(kPrimNames[0])); ++i) {
        if (name == kPrimNames[i]) {
            out = static_cast<Prim>(i);
            return true;
        }
    }
    return false;
}

PrimArity prim_arity(Prim p) {
    switch (p) {
        case Prim::HASH:
        case Prim::HKDF:
        case Prim::MAC:
        case Prim::HMAC:
        case Prim::RATCHET:
            return {1, SIZE_MAX};
        case Prim::ENC:
        case Prim::DEC:
        case Prim::SIGN:
            return {2, 2};
        case Prim::AEAD_ENC:
        case Prim::AEAD_DEC:
        case Prim::SIGNVERIF:
            return {3, 3};
        case Prim::PK:
            return {1, 1};
    }
    return {1, SIZE_MAX};
}

Term constant(const std::string& name) {
    TermNode n;
    n.kind = Kind::PublicConstant;
    n.name = name;
    return intern_checked(std::move(n), "constant");
}

Term fresh(const std::string& principal, const std::string& name, int phase) {
    TermNode n;
    n.kind = Kind::FreshValue;
    n.name = name;
    n.principal = principal;
    n.phase = phase;
    return intern_checked(std::move(n), "fresh value");
}

Term attacker_value(const std::string& name, int phase) {
    TermNode n;
    n.kind = Kind::AttackerValue;
    n.name = name;
    n.phase = phase;
    return intern_checked(std::move(n), "attacker value");
}

Term generator() {
    static const Term g = constant("G");
    return g;
}

Term true_constant() {
    static const Term t = constant("true");
    return t;
}

Term exp(const Term& base, const Term& exponent) {
    TermNode n;
    n.kind = Kind::Exp;
    if (base->kind == Kind::Exp) {
        // exp of exp merges exponent multisets
        n.base = base->base;
        n.children = base->children;
    } else {
        n.base = base;
    }
    n.children.push_back(exponent);
    std::sort(n.children.begin(), n.children.end(), TermLess{});
    return intern_checked(std::move(n), "exponentiation");
}

Term prim(Prim p, std::vector<Term> args) {
    PrimArity ar = prim_arity(p);
    if (args.size() < ar.min || args.size() > ar.max) {
        std::ostringstream os;
        os << prim_name(p) << " expects ";
        if (ar.min == ar.max)
            os << ar.min;
        else
            os << "at least " << ar.min;
        os << " argument(s), got " << args.size();
        throw TermError(os.str());
    }

    switch (p) {
        case Prim::DEC: {
            // DEC(k, ENC(k, m)) -> m; never fails, stuck otherwise
            const Term& k = args[0];
            const Term& c = args[1];
            if (c->kind == Kind::Prim && c->prim == Prim::ENC && equal(c->children[0], k))
                return c->children[1];
            break;
        }
        case Prim::AEAD_DEC: {
            // AEAD_DEC(k, AEAD_ENC(k, m, ad), ad) -> m
            const Term& k = args[0];
            const Term& c = args[1];
            const Term& ad = args[2];
            if (c->kind == Kind::Prim && c->prim == Prim::AEAD_ENC &&
                equal(c->children[0], k) && equal(c->children[2], ad))
                return c->children[1];
            break;
        }
        case Prim::SIGNVERIF: {
            // SIGNVERIF(vk, m, SIGN(sk, m)) -> true when vk is PK(sk) or G^{sk}
            const Term& vk = args[0];
            const Term& m = args[1];
            const Term& sig = args[2];
            if (sig->kind == Kind::Prim && sig->prim == Prim::SIGN &&
                equal(sig->children[1], m)) {
                const Term& sk = sig->children[0];
                bool pk_form = vk->kind == Kind::Prim && vk->prim == Prim::PK &&
                               equal(vk->children[0], sk);
                bool dh_form = vk->kind == Kind::Exp && equal(vk->base, generator()) &&
                               vk->children.size() == 1 && equal(vk->children[0], sk);
                if (pk_form || dh_form) return true_constant();
            }
            break;
        }
        default:
            break;
    }

    TermNode n;
    n.kind = Kind::Prim;
    n.prim = p;
    n.children = std::move(args);
    return intern_checked(std::move(n), prim_name(p));
}

Term tuple(std::vector<Term> elems) {
    TermNode n;
    n.kind = Kind::Tuple;
    n.children = std::move(elems);
    return intern_checked(std::move(n), "tuple");
}

Term projection(std::size_t index, const Term& source) {
    if (source->kind == Kind::Tuple) {
        if (index >= source->children.size())
            throw TermError("projection index out of range");
        return source->children[index];
    }
    TermNode n;
    n.kind = Kind::Projection;
    n.index = index;
    n.base = source;
    return intern_checked(std::move(n), "projection");
}

Term normalize(const Term& t) {
    switch (t->kind) {
        case Kind::PublicConstant:
        case Kind::FreshValue:
        case Kind::AttackerValue:
            return t;
        case Kind::Exp: {
            Term acc = normalize(t->base);
            for (const auto& e : t->children) acc = exp(acc, normalize(e));
            return acc;
        }
        case Kind::Prim: {
            std::vector<Term> args;
            args.reserve(t->children.size());
            for (const auto& c : t->children) args.push_back(normalize(c));
            return prim(t->prim, std::move(args));
        }
        case Kind::Tuple: {
            std::vector<Term> elems;
            elems.reserve(t->children.size());
            for (const auto& c : t->children) elems.push_back(normalize(c));
            return tuple(std::move(elems));
        }
        case Kind::Projection:
            return projection(t->index, normalize(t->base));
    }
    return t;
}

int compare(const Term& a, const Term& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    switch (a->kind) {
        case Kind::PublicConstant:
            return a->name.compare(b->name);
        case Kind::FreshValue: {
            if (int c = a->principal.compare(b->principal)) return c;
            if (int c = a->name.compare(b->name)) return c;
            return a->phase - b->phase;
        }
        case Kind::AttackerValue: {
            if (int c = a->name.compare(b->name)) return c;
            return a->phase - b->phase;
        }
        case Kind::Prim:
            if (a->prim != b->prim)
                return std::string(prim_name(a->prim)).compare(prim_name(b->prim)) < 0 ? -1 : 1;
            break;
        case Kind::Projection: {
            if (a->index != b->index) return a->index < b->index ? -1 : 1;
            return compare(a->base, b->base);
        }
        case Kind::Exp: {
            if (int c = compare(a->base, b->base)) return c;
            break;
        }
        case Kind::Tuple:
            break;
    }
    if (a->children.size() != b->children.size())
        return a->children.size() < b->children.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (int c = compare(a->children[i], b->children[i])) return c;
    return 0;
}

namespace {
void collect(const Term& t, std::unordered_set<Term>& out) {
    if (!out.insert(t).second) return;
    if (t->base) collect(t->base, out);
    for (const auto& c : t->children) collect(c, out);
}
}  // namespace

std::unordered_set<Term> subterms(const Term& t) {
    std::unordered_set<Term> out;
    collect(t, out);
    return out;
}

std::string render(const Term& t) {
    std::ostringstream os;
    switch (t->kind) {
        case Kind::PublicConstant:
        case Kind::FreshValue:
        case Kind::AttackerValue:
            os << t->name;
            break;
        case Kind::Exp: {
            os << render(t->base) << "^{";
            for (std::size_t i = 0; i < t->children.size(); ++i) {
                if (i) os << ',';
                os << render(t->children[i]);
            }
            os << '}';
            break;
        }
        case Kind::Prim: {
            os << prim_name(t->prim) << '(';
            for (std::size_t i = 0; i < t->children.size(); ++i) {
                if (i) os << ", ";
                os << render(t->children[i]);
            }
            os << ')';
            break;
        }
        case Kind::Tuple: {
            os << '(';
            for (std::size_t i = 0; i < t->children.size(); ++i) {
                if (i) os << ", ";
                os << render(t->children[i]);
            }
            os << ')';
            break;
        }
        case Kind::Projection:
            os << render(t->base) << '[' << t->index << ']';
            break;
    }
    return os.str();
}

}  // namespace dyw::term
