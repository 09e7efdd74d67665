// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "lexer.hpp"

namespace dyw::dsl {

namespace {

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

const char* token_kind_name(Token::Kind k) {
    switch (k) {
        case Token::Kind::Ident: return "identifier";
        case Token::Kind::Integer: return "integer";
        case Token::Kind::LBracket: return "'['";
        case Token::Kind::RBracket: return "']'";
        case Token::Kind::LParen: return "'('";
        case Token::Kind::RParen: return "')'";
        case Token::Kind::Comma: return "','";
        case Token::Kind::Equals: return "'='";
        case Token::Kind::Caret: return "'^'";
        case Token::Kind::Question: return "'?'";
        case Token::Kind::Colon: return "':'";
        case Token::Kind::Arrow: return "'->'";
        case Token::Kind::End: return "end of input";
        case Token::Kind::Error: return "invalid input";
    }
    return "?";
}

std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diagnostics) {
    std::vector<Token> tokens;
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    const std::size_t n = source.size();

    auto loc = [&] { return SourceLoc{line, col}; };
    auto bump = [&](std::size_t count) {
        for (std::size_t k = 0; k < count && i < n; ++k, ++i) {
            if (source[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Token::Kind kind, std::string text, SourceLoc at) {
        tokens.push_back(Token{kind, std::move(text), at});
    };

    while (i < n) {
        char c = source[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            bump(1);
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            while (i < n && source[i] != '\n') bump(1);
            continue;
        }
        SourceLoc at = loc();
        if (is_ident_start(c)) {
            std::size_t start = i;
            while (i < n && is_ident_char(source[i])) bump(1);
            push(Token::Kind::Ident, std::string(source.substr(start, i - start)), at);
            continue;
        }
        if (is_digit(c)) {
            std::size_t start = i;
            while (i < n && is_digit(source[i])) bump(1);
            push(Token::Kind::Integer, std::string(source.substr(start, i - start)), at);
            continue;
        }
        if (c == '-' && i + 1 < n && source[i + 1] == '>') {
            bump(2);
            push(Token::Kind::Arrow, "->", at);
            continue;
        }
        Token::Kind kind;
        switch (c) {
            case '[': kind = Token::Kind::LBracket; break;
            case ']': kind = Token::Kind::RBracket; break;
            case '(': kind = Token::Kind::LParen; break;
            case ')': kind = Token::Kind::RParen; break;
            case ',': kind = Token::Kind::Comma; break;
            case '=': kind = Token::Kind::Equals; break;
            case '^': kind = Token::Kind::Caret; break;
            case '?': kind = Token::Kind::Question; break;
            case ':': kind = Token::Kind::Colon; break;
            default: {
                diagnostics.push_back(
                    {at, std::string("unexpected character '") +
                             (c >= 0x20 && c < 0x7f ? std::string(1, c)
                                                    : "\\x" + std::to_string((unsigned char)c)) +
                             "'"});
                push(Token::Kind::Error, std::string(1, c), at);
                bump(1);
                continue;
            }
        }
        bump(1);
        push(kind, std::string(1, c), at);
    }

    SourceLoc end_loc{line, col};
    push(Token::Kind::End, "", end_loc);
    return tokens;
}

}  // namespace dyw::dsl
