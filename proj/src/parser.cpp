// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <sstream>

#include "dyw/dsl.hpp"
#include "lexer.hpp"

namespace dyw::dsl {

ExprPtr make_ident(std::string name, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Ident;
    e->name = std::move(name);
    e->loc = loc;
    return e;
}

ExprPtr make_call(std::string name, std::vector<ExprPtr> args, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Call;
    e->name = std::move(name);
    e->args = std::move(args);
    e->loc = loc;
    return e;
}

ExprPtr make_pow(ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Pow;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    e->loc = loc;
    return e;
}

std::string to_string(const Query& q) {
    if (q.kind == Query::Kind::Confidentiality) return "confidentiality? " + q.ident;
    return "authentication? " + q.sender + " -> " + q.receiver + ": " + q.ident;
}

namespace {

constexpr int kMaxExprDepth = 96;

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diagnostics)
        : tokens_(std::move(tokens)), diags_(diagnostics) {}

    std::optional<ModelAST> run() {
        ModelAST ast;
        if (!parse_attacker(ast)) return std::nullopt;
        while (!at(Token::Kind::End)) {
            if (!parse_item(ast)) return std::nullopt;
        }
        return ast;
    }

private:
    std::vector<Token> tokens_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        if (i >= tokens_.size()) i = tokens_.size() - 1;
        return tokens_[i];
    }
    bool at(Token::Kind k) const { return peek().kind == k; }
    bool at_word(const char* w) const {
        return peek().kind == Token::Kind::Ident && peek().text == w;
    }
    const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    void error(const std::string& message) { diags_.push_back({peek().loc, message}); }
    void error_at(SourceLoc loc, const std::string& message) { diags_.push_back({loc, message}); }

    bool expect(Token::Kind k, const char* context) {
        if (at(k)) {
            advance();
            return true;
        }
        std::ostringstream os;
        os << "expected " << token_kind_name(k) << " " << context << ", found "
           << token_kind_name(peek().kind);
        if (peek().kind == Token::Kind::Ident) os << " '" << peek().text << "'";
        error(os.str());
        return false;
    }

    bool expect_ident(std::string& out, const char* context) {
        if (at(Token::Kind::Ident)) {
            out = advance().text;
            return true;
        }
        error(std::string("expected identifier ") + context + ", found " +
              token_kind_name(peek().kind));
        return false;
    }

    bool parse_attacker(ModelAST& ast) {
        if (!at_word("attacker")) {
            error("model must start with attacker[active] or attacker[passive]");
            return false;
        }
        advance();
        if (!expect(Token::Kind::LBracket, "after 'attacker'")) return false;
        if (at_word("active")) {
            ast.attacker_mode = AttackerMode::Active;
        } else if (at_word("passive")) {
            ast.attacker_mode = AttackerMode::Passive;
        } else {
            error("attacker mode must be 'active' or 'passive'");
            return false;
        }
        advance();
        return expect(Token::Kind::RBracket, "to close the attacker declaration");
    }

    bool parse_item(ModelAST& ast) {
        if (at_word("principal")) return parse_principal(ast);
        if (at_word("phase")) return parse_phase(ast);
        if (at_word("queries")) return parse_queries(ast);
        if (at(Token::Kind::Ident) && peek(1).kind == Token::Kind::Arrow)
            return parse_message(ast);
        error("expected 'principal', 'phase', 'queries', or a message line");
        return false;
    }

    bool parse_principal(ModelAST& ast) {
        PrincipalBlock block;
        block.loc = peek().loc;
        advance();  // principal
        if (!expect_ident(block.name, "as the principal name")) return false;
        if (!expect(Token::Kind::LBracket, "to open the principal block")) return false;
        while (!at(Token::Kind::RBracket)) {
            if (at(Token::Kind::End)) {
                error("unclosed principal block '" + block.name + "': expected ']'");
                return false;
            }
            Statement st;
            if (!parse_statement(st)) return false;
            block.statements.push_back(std::move(st));
        }
        advance();  // ]
        ast.items.emplace_back(std::move(block));
        return true;
    }

    bool parse_name_list(std::vector<std::string>& names, const char* context) {
        std::string name;
        if (!expect_ident(name, context)) return false;
        names.push_back(std::move(name));
        while (at(Token::Kind::Comma)) {
            advance();
            if (!expect_ident(name, context)) return false;
            names.push_back(std::move(name));
        }
        return true;
    }

    bool parse_statement(Statement& st) {
        st.loc = peek().loc;
        if (at_word("generates")) {
            advance();
            st.kind = Statement::Kind::Generates;
            return parse_name_list(st.names, "after 'generates'");
        }
        if (at_word("leaks")) {
            advance();
            st.kind = Statement::Kind::Leaks;
            return parse_name_list(st.names, "after 'leaks'");
        }
        if (at_word("knows")) {
            advance();
            st.kind = Statement::Kind::Knows;
            if (at_word("public")) {
                st.visibility = Statement::Visibility::Public;
            } else if (at_word("private")) {
                st.visibility = Statement::Visibility::Private;
            } else {
                error("expected 'public' or 'private' after 'knows'");
                return false;
            }
            advance();
            return parse_name_list(st.names, "after the knows visibility");
        }
        if (at(Token::Kind::Ident) && peek(1).kind == Token::Kind::LParen) {
            // bare checked call, e.g. SIGNVERIF(pk, m, sig)
            st.kind = Statement::Kind::Assignment;
            return parse_expr(st.expr, 0);
        }
        st.kind = Statement::Kind::Assignment;
        if (!parse_name_list(st.names, "at the start of an assignment")) return false;
        if (!expect(Token::Kind::Equals, "in assignment")) return false;
        return parse_expr(st.expr, 0);
    }

    bool parse_expr(ExprPtr& out, int depth) {
        if (depth > kMaxExprDepth) {
            error("expression nesting too deep");
            return false;
        }
        ExprPtr lhs;
        if (!parse_atom(lhs, depth)) return false;
        while (at(Token::Kind::Caret)) {
            SourceLoc loc = peek().loc;
            advance();
            ExprPtr rhs;
            if (!parse_atom(rhs, depth)) return false;
            lhs = make_pow(std::move(lhs), std::move(rhs), loc);
        }
        out = std::move(lhs);
        return true;
    }

    bool parse_atom(ExprPtr& out, int depth) {
        if (!at(Token::Kind::Ident)) {
            error(std::string("expected an identifier or primitive call, found ") +
                  token_kind_name(peek().kind));
            return false;
        }
        Token name = advance();
        if (at(Token::Kind::LParen)) {
            advance();
            std::vector<ExprPtr> args;
            if (!at(Token::Kind::RParen)) {
                ExprPtr arg;
                if (!parse_expr(arg, depth + 1)) return false;
                args.push_back(std::move(arg));
                while (at(Token::Kind::Comma)) {
                    advance();
                    if (!parse_expr(arg, depth + 1)) return false;
                    args.push_back(std::move(arg));
                }
            }
            if (!expect(Token::Kind::RParen, "to close the argument list")) return false;
            out = make_call(name.text, std::move(args), name.loc);
            return true;
        }
        out = make_ident(name.text, name.loc);
        return true;
    }

    bool parse_message(ModelAST& ast) {
        MessageLine msg;
        msg.loc = peek().loc;
        msg.sender = advance().text;
        advance();  // ->
        if (!expect_ident(msg.receiver, "as the message receiver")) return false;
        if (!expect(Token::Kind::Colon, "after the message receiver")) return false;
        while (true) {
            Slot slot;
            slot.loc = peek().loc;
            if (at(Token::Kind::LBracket)) {
                advance();
                slot.guarded = true;
                if (!expect_ident(slot.name, "inside the guard brackets")) return false;
                if (!expect(Token::Kind::RBracket, "to close the guard")) return false;
            } else {
                if (!expect_ident(slot.name, "as a message value")) return false;
            }
            msg.slots.push_back(std::move(slot));
            if (!at(Token::Kind::Comma)) break;
            advance();
        }
        ast.items.emplace_back(std::move(msg));
        return true;
    }

    bool parse_phase(ModelAST& ast) {
        PhaseMarker marker;
        marker.loc = peek().loc;
        advance();  // phase
        if (!expect(Token::Kind::LBracket, "after 'phase'")) return false;
        if (!at(Token::Kind::Integer)) {
            error("expected a phase number");
            return false;
        }
        Token num = advance();
        long value = std::strtol(num.text.c_str(), nullptr, 10);
        if (value <= 0 || num.text.size() > 6) {
            error_at(num.loc, "phase number out of range");
            return false;
        }
        marker.phase = static_cast<int>(value);
        if (!expect(Token::Kind::RBracket, "to close the phase marker")) return false;
        ast.items.emplace_back(marker);
        return true;
    }

    bool parse_queries(ModelAST& ast) {
        advance();  // queries
        if (!expect(Token::Kind::LBracket, "to open the queries block")) return false;
        while (!at(Token::Kind::RBracket)) {
            if (at(Token::Kind::End)) {
                error("unclosed queries block: expected ']'");
                return false;
            }
            Query q;
            q.loc = peek().loc;
            if (at_word("confidentiality")) {
                advance();
                q.kind = Query::Kind::Confidentiality;
                if (!expect(Token::Kind::Question, "after 'confidentiality'")) return false;
                if (!expect_ident(q.ident, "as the confidentiality target")) return false;
            } else if (at_word("authentication")) {
                advance();
                q.kind = Query::Kind::Authentication;
                if (!expect(Token::Kind::Question, "after 'authentication'")) return false;
                if (!expect_ident(q.sender, "as the authentication sender")) return false;
                if (!expect(Token::Kind::Arrow, "between the principals")) return false;
                if (!expect_ident(q.receiver, "as the authentication receiver")) return false;
                if (!expect(Token::Kind::Colon, "before the queried value")) return false;
                if (!expect_ident(q.ident, "as the queried value")) return false;
            } else {
                error("expected 'confidentiality?' or 'authentication?' query");
                return false;
            }
            ast.queries.push_back(std::move(q));
        }
        advance();  // ]
        return true;
    }
};

}  // namespace

ParseResult parse(std::string_view source) {
    ParseResult result;
    auto tokens = lex(source, result.diagnostics);
    if (!result.diagnostics.empty()) return result;
    Parser parser(std::move(tokens), result.diagnostics);
    result.ast = parser.run();
    if (!result.diagnostics.empty()) result.ast.reset();
    return result;
}

}  // namespace dyw::dsl
