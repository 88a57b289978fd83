// Copyright 2026 The disco Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexer.hpp"

#include <array>
#include <cctype>

namespace disco::detail {
namespace {

constexpr std::array<std::string_view, 8> kTwoCharSymbols = {
    "<=", ">=", "==", "!=", "&&", "||", "..", "->"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::size_t line,
                            std::size_t column) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    std::size_t len = 0;
    if (digit(c)) {
      tok.kind = TokenKind::Number;
      while (i + len < text.size() && digit(text[i + len])) ++len;
      // A '.' followed by a digit continues a decimal; ".." is a range.
      if (i + len + 1 < text.size() && text[i + len] == '.' &&
          digit(text[i + len + 1])) {
        ++len;
        while (i + len < text.size() && digit(text[i + len])) ++len;
      }
    } else if (ident_start(c)) {
      tok.kind = TokenKind::Identifier;
      while (i + len < text.size() && ident_char(text[i + len])) ++len;
    } else {
      tok.kind = TokenKind::Symbol;
      len = 1;
      if (i + 1 < text.size()) {
        const std::string_view two = text.substr(i, 2);
        for (auto s : kTwoCharSymbols)
          if (two == s) len = 2;
      }
      static constexpr std::string_view kSingles = "+-*/<>=!()[]{},;:|@";
      if (len == 1 && kSingles.find(c) == std::string_view::npos)
        throw ParseError(std::string("unexpected character '") + c + "'",
                         line, column);
    }
    tok.text = std::string(text.substr(i, len));
    advance(len);
    out.push_back(std::move(tok));
  }
  Token end;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

}  // namespace disco::detail
