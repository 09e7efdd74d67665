// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_SRC_LEXER_HPP_
#define DYW_SRC_LEXER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "dyw/diagnostics.hpp"

namespace dyw::dsl {

struct Token {
    enum class Kind {
        Ident,
        Integer,
        LBracket,   // [
        RBracket,   // ]
        LParen,     // (
        RParen,     // )
        Comma,      // ,
        Equals,     // =
        Caret,      // ^
        Question,   // ?
        Colon,      // :
        Arrow,      // ->
        End,
        Error,
    };

    Kind kind;
    std::string text;
    SourceLoc loc;
};

/// Splits a document into tokens. Unknown bytes become Error tokens with a
/// diagnostic; the stream always ends with End.
std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diagnostics);

const char* token_kind_name(Token::Kind k);

}  // namespace dyw::dsl

#endif  // DYW_SRC_LEXER_HPP_
