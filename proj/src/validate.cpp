// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <sstream>

#include "dyw/dsl.hpp"
#include "dyw/term.hpp"

namespace dyw::dsl {

namespace {

struct NameInfo {
    Statement::Kind kind;
    Statement::Visibility visibility = Statement::Visibility::Private;
    std::string principal;
    SourceLoc loc;
};

class Validator {
public:
    explicit Validator(const ModelAST& ast) : ast_(ast) {}

    std::vector<Diagnostic> run() {
        int phase = 0;
        for (const auto& item : ast_.items) {
            if (const auto* block = std::get_if<PrincipalBlock>(&item)) {
                check_block(*block);
            } else if (const auto* msg = std::get_if<MessageLine>(&item)) {
                check_message(*msg);
            } else if (const auto* marker = std::get_if<PhaseMarker>(&item)) {
                if (marker->phase <= phase) {
                    std::ostringstream os;
                    os << "phase markers must strictly increase: phase[" << marker->phase
                       << "] after phase " << phase;
                    diags_.push_back({marker->loc, os.str()});
                }
                phase = marker->phase;
            }
        }
        for (const auto& q : ast_.queries) check_query(q);
        return std::move(diags_);
    }

private:
    const ModelAST& ast_;
    std::vector<Diagnostic> diags_;
    std::map<std::string, NameInfo> defs_;
    std::map<std::string, std::set<std::string>> views_;  // principal -> known names

    bool knows(const std::string& principal, const std::string& name) const {
        if (name == "G") return true;
        auto it = views_.find(principal);
        return it != views_.end() && it->second.count(name) > 0;
    }

    void define(const std::string& principal, const std::string& name, Statement::Kind kind,
                Statement::Visibility vis, SourceLoc loc) {
        auto it = defs_.find(name);
        if (it != defs_.end()) {
            // A shared secret or public value may be introduced by several
            // principals with matching 'knows' statements.
            bool shared_knows = kind == Statement::Kind::Knows &&
                                it->second.kind == Statement::Kind::Knows &&
                                it->second.visibility == vis &&
                                it->second.principal != principal;
            if (!shared_knows) {
                std::ostringstream os;
                os << "'" << name << "' is already defined (at " << to_string(it->second.loc)
                   << ")";
                diags_.push_back({loc, os.str()});
                return;
            }
        } else {
            defs_[name] = NameInfo{kind, vis, principal, loc};
        }
        views_[principal].insert(name);
    }

    void check_expr(const std::string& principal, const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Ident:
                if (!knows(principal, e.name)) {
                    diags_.push_back({e.loc, "use of '" + e.name + "' before " + principal +
                                                 " knows it"});
                }
                break;
            case Expr::Kind::Pow:
                check_expr(principal, *e.lhs);
                check_expr(principal, *e.rhs);
                break;
            case Expr::Kind::Call: {
                term::Prim p;
                if (!term::lookup_prim(e.name, p)) {
                    diags_.push_back({e.loc, "unknown primitive '" + e.name + "'"});
                } else {
                    auto ar = term::prim_arity(p);
                    if (e.args.size() < ar.min || e.args.size() > ar.max) {
                        std::ostringstream os;
                        os << e.name << " expects ";
                        if (ar.min == ar.max)
                            os << ar.min;
                        else
                            os << "at least " << ar.min;
                        os << " argument(s), got " << e.args.size();
                        diags_.push_back({e.loc, os.str()});
                    }
                }
                for (const auto& a : e.args) check_expr(principal, *a);
                break;
            }
        }
    }

    void check_block(const PrincipalBlock& block) {
        for (const auto& st : block.statements) {
            switch (st.kind) {
                case Statement::Kind::Generates:
                    for (const auto& n : st.names)
                        define(block.name, n, st.kind, st.visibility, st.loc);
                    break;
                case Statement::Kind::Knows:
                    for (const auto& n : st.names)
                        define(block.name, n, st.kind, st.visibility, st.loc);
                    break;
                case Statement::Kind::Leaks:
                    for (const auto& n : st.names) {
                        if (!knows(block.name, n))
                            diags_.push_back(
                                {st.loc, block.name + " cannot leak unknown value '" + n + "'"});
                    }
                    break;
                case Statement::Kind::Assignment: {
                    check_expr(block.name, *st.expr);
                    std::size_t outputs = 1;
                    bool multi_ok = st.expr->kind == Expr::Kind::Call && st.expr->name == "HKDF";
                    if (!st.names.empty() && st.names.size() != outputs && !multi_ok) {
                        std::ostringstream os;
                        os << "arity mismatch: " << st.names.size()
                           << " assignment targets but the expression yields one output";
                        diags_.push_back({st.loc, os.str()});
                    }
                    for (const auto& n : st.names)
                        define(block.name, n, st.kind, st.visibility, st.loc);
                    break;
                }
            }
        }
    }

    void check_message(const MessageLine& msg) {
        if (msg.sender == msg.receiver)
            diags_.push_back({msg.loc, "message sender and receiver are both '" + msg.sender +
                                           "'"});
        for (const auto& slot : msg.slots) {
            if (!knows(msg.sender, slot.name)) {
                diags_.push_back({slot.loc, msg.sender + " sends '" + slot.name +
                                                "' before knowing it"});
            }
            views_[msg.receiver].insert(slot.name);
        }
    }

    void check_query(const Query& q) {
        if (!defs_.count(q.ident)) {
            diags_.push_back({q.loc, "unknown identifier in query: '" + q.ident + "'"});
            return;
        }
        if (q.kind == Query::Kind::Authentication) {
            for (const auto& item : ast_.items) {
                const auto* msg = std::get_if<MessageLine>(&item);
                if (!msg || msg->sender != q.sender || msg->receiver != q.receiver) continue;
                for (const auto& slot : msg->slots)
                    if (slot.name == q.ident) return;
            }
            diags_.push_back({q.loc, "'" + q.ident + "' is never sent from " + q.sender +
                                         " to " + q.receiver});
        }
    }
};

void print_expr(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Ident:
            os << e.name;
            break;
        case Expr::Kind::Pow:
            print_expr(os, *e.lhs);
            os << '^';
            print_expr(os, *e.rhs);
            break;
        case Expr::Kind::Call:
            os << e.name << '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) os << ", ";
                print_expr(os, *e.args[i]);
            }
            os << ')';
            break;
    }
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.name != b.name) return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
    if ((a.lhs == nullptr) != (b.lhs == nullptr)) return false;
    if (a.lhs && (!expr_equal(*a.lhs, *b.lhs) || !expr_equal(*a.rhs, *b.rhs))) return false;
    return true;
}

}  // namespace

std::vector<Diagnostic> validate(const ModelAST& ast) { return Validator(ast).run(); }

std::string pretty_print(const ModelAST& ast) {
    std::ostringstream os;
    os << "attacker[" << (ast.attacker_mode == AttackerMode::Active ? "active" : "passive")
       << "]\n\n";
    for (const auto& item : ast.items) {
        if (const auto* block = std::get_if<PrincipalBlock>(&item)) {
            os << "principal " << block->name << "[\n";
            for (const auto& st : block->statements) {
                os << "    ";
                switch (st.kind) {
                    case Statement::Kind::Generates:
                        os << "generates ";
                        break;
                    case Statement::Kind::Knows:
                        os << "knows "
                           << (st.visibility == Statement::Visibility::Public ? "public "
                                                                              : "private ");
                        break;
                    case Statement::Kind::Leaks:
                        os << "leaks ";
                        break;
                    case Statement::Kind::Assignment:
                        break;
                }
                for (std::size_t i = 0; i < st.names.size(); ++i) {
                    if (i) os << ", ";
                    os << st.names[i];
                }
                if (st.kind == Statement::Kind::Assignment) {
                    if (!st.names.empty()) os << " = ";
                    print_expr(os, *st.expr);
                }
                os << '\n';
            }
            os << "]\n\n";
        } else if (const auto* msg = std::get_if<MessageLine>(&item)) {
            os << msg->sender << " -> " << msg->receiver << ": ";
            for (std::size_t i = 0; i < msg->slots.size(); ++i) {
                if (i) os << ", ";
                if (msg->slots[i].guarded)
                    os << '[' << msg->slots[i].name << ']';
                else
                    os << msg->slots[i].name;
            }
            os << "\n\n";
        } else if (const auto* marker = std::get_if<PhaseMarker>(&item)) {
            os << "phase[" << marker->phase << "]\n\n";
        }
    }
    if (!ast.queries.empty()) {
        os << "queries[\n";
        for (const auto& q : ast.queries) os << "    " << to_string(q) << '\n';
        os << "]\n";
    }
    return os.str();
}

bool structurally_equal(const ModelAST& a, const ModelAST& b) {
    if (a.attacker_mode != b.attacker_mode) return false;
    if (a.items.size() != b.items.size() || a.queries.size() != b.queries.size()) return false;
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        if (a.items[i].index() != b.items[i].index()) return false;
        if (const auto* pa = std::get_if<PrincipalBlock>(&a.items[i])) {
            const auto& pb = std::get<PrincipalBlock>(b.items[i]);
            if (pa->name != pb.name || pa->statements.size() != pb.statements.size())
                return false;
            for (std::size_t j = 0; j < pa->statements.size(); ++j) {
                const auto& sa = pa->statements[j];
                const auto& sb = pb.statements[j];
                if (sa.kind != sb.kind || sa.visibility != sb.visibility ||
                    sa.names != sb.names)
                    return false;
                if ((sa.expr == nullptr) != (sb.expr == nullptr)) return false;
                if (sa.expr && !expr_equal(*sa.expr, *sb.expr)) return false;
            }
        } else if (const auto* ma = std::get_if<MessageLine>(&a.items[i])) {
            const auto& mb = std::get<MessageLine>(b.items[i]);
            if (ma->sender != mb.sender || ma->receiver != mb.receiver ||
                ma->slots.size() != mb.slots.size())
                return false;
            for (std::size_t j = 0; j < ma->slots.size(); ++j)
                if (ma->slots[j].name != mb.slots[j].name ||
                    ma->slots[j].guarded != mb.slots[j].guarded)
                    return false;
        } else {
            if (std::get<PhaseMarker>(a.items[i]).phase != std::get<PhaseMarker>(b.items[i]).phase)
                return false;
        }
    }
    for (std::size_t i = 0; i < a.queries.size(); ++i) {
        const auto& qa = a.queries[i];
        const auto& qb = b.queries[i];
        if (qa.kind != qb.kind || qa.ident != qb.ident || qa.sender != qb.sender ||
            qa.receiver != qb.receiver)
            return false;
    }
    return true;
}

}  // namespace dyw::dsl
