#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "modat/source.hpp"
#include "modat/value.hpp"

namespace modat::detail {

enum class Tok {
    End,
    Ident,
    Keyword,
    Int,     // integer literal, magnitude in `integer`
    Real,
    Time,
    Bool,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Arrow,   // ->
    Assign,  // :=
    Equals,  // =
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Error,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
    std::int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
};

bool is_keyword(std::string_view word);

/// Splits the whole input up front. Lexical errors become Tok::Error tokens
/// carrying the message in `text`; the token stream always ends with Tok::End.
std::vector<Token> tokenize(std::string_view text, std::string_view file);

std::string describe(const Token& t);

}  // namespace modat::detail
