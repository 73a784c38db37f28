#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsp/diag.hpp"

namespace dsp {

enum class Tok {
    Ident,
    IntLit,
    RealLit,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Le,   // =<
    Ge,   // >=
    Lt,   // <
    Gt,   // >
    Eq,   // =   (binding and equality share the token)
    Ne,   // \=
    Eof,
};

const char* token_name(Tok t);

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::int64_t int_val = 0;
    double real_val = 0.0;
    Position pos;
};

// Splits source text into tokens. `--` starts a comment running to end of
// line; whitespace is insignificant. Throws LexError with the position of
// the offending character.
std::vector<Token> tokenize(const std::string& source);

}  // namespace dsp
