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

#pragma once

// Tokenizer shared by the expression, query and model-file parsers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "disco/error.hpp"

namespace disco::detail {

enum class TokenKind { Number, Identifier, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is(std::string_view symbol) const {
    return (kind == TokenKind::Symbol || kind == TokenKind::Identifier) &&
           text == symbol;
  }
};

// Splits `text` into tokens. Numbers are unsigned integers or decimals;
// signs and '/' are separate symbols. `line` and `column` locate the first
// character of `text` inside its enclosing document.
std::vector<Token> tokenize(std::string_view text, std::size_t line = 1,
                            std::size_t column = 1);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool accept(std::string_view symbol) {
    if (!peek().is(symbol)) return false;
    next();
    return true;
  }
  const Token& expect(std::string_view symbol) {
    if (!peek().is(symbol)) fail("expected '" + std::string(symbol) + "'");
    return next();
  }
  bool at_end() const { return peek().kind == TokenKind::End; }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input"
                                                 : "'" + t.text + "'";
    throw ParseError(message + ", found " + found, t.line, t.column);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace disco::detail
