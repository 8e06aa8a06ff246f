#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Minimal Java-ish tokenizer used by the heuristic frontend. Comments are
// dropped, every operator is a single-character Punct token.
namespace weft::java {

enum class TokKind { Ident, String, Char, Number, Punct };

struct Token {
  TokKind kind;
  std::string text;  // unescaped contents for String tokens
  int line = 1;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;

  bool is(char c) const noexcept { return kind == TokKind::Punct && text.size() == 1 && text[0] == c; }
  bool is_ident() const noexcept { return kind == TokKind::Ident; }
  bool is_ident(std::string_view s) const noexcept { return kind == TokKind::Ident && text == s; }
};

std::vector<Token> lex(std::string_view source);

using Tokens = std::span<const Token>;

/// Index of the token closing the bracket opened at `open` (one of `(`,
/// `[`, `{`), or tokens.size() when unbalanced.
std::size_t match_close(Tokens tokens, std::size_t open);

/// Splits tokens[begin, end) on commas at nesting depth zero. Angle brackets
/// count as nesting when `angles` is set (type contexts).
std::vector<std::pair<std::size_t, std::size_t>> split_top_level(Tokens tokens, std::size_t begin,
                                                                 std::size_t end, bool angles = false);

/// Renders tokens as compact type text: `Map<String,List<Long>>`, `int[]`.
std::string type_text(Tokens tokens, std::size_t begin, std::size_t end);

bool is_modifier(std::string_view word) noexcept;
bool is_statement_keyword(std::string_view word) noexcept;

}  // namespace weft::java
