#pragma once

#include <string>
#include <vector>

#include "dsp/ast.hpp"
#include "dsp/token.hpp"

namespace dsp {

// Parses one module from the front of the token stream. Throws ParseError.
ModuleDecl parse_module(const std::vector<Token>& tokens, std::size_t& cursor);

// Parses a whole file: one or more modules up to end of input.
std::vector<ModuleDecl> parse_file(const std::vector<Token>& tokens);
std::vector<ModuleDecl> parse_source(const std::string& source);

// Parses a standalone value literal (int, real, bool, or list), as used
// for `name=value` inputs on the command line. Unary minus is allowed.
ExprPtr parse_literal_expr(const std::string& text);

}  // namespace dsp
