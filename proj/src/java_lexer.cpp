#include "java_lexer.hpp"

#include <array>
#include <cctype>

namespace weft::java {
namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

char unescape(char c) {
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'b': return '\b';
    case 'f': return '\f';
    case '0': return '\0';
    default: return c;
  }
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  const auto n = src.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(src[i]);
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      i += 2;
      while (i < n && !(src[i] == '*' && i + 1 < n && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      i = (i < n) ? i + 2 : n;
      continue;
    }
    Token tok{TokKind::Punct, {}, line, i, i};
    if (c == '"' && src.substr(i, 3) == "\"\"\"") {
      // text block
      std::size_t j = i + 3;
      while (j < n && src.substr(j, 3) != "\"\"\"") {
        if (src[j] == '\\' && j + 1 < n) {
          tok.text += unescape(src[j + 1]);
          j += 2;
          continue;
        }
        if (src[j] == '\n') ++line;
        tok.text += src[j];
        ++j;
      }
      tok.kind = TokKind::String;
      i = (j < n) ? j + 3 : n;
    } else if (c == '"' || c == '\'') {
      const char quote = static_cast<char>(c);
      std::size_t j = i + 1;
      while (j < n && src[j] != quote && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < n) {
          tok.text += unescape(src[j + 1]);
          j += 2;
          continue;
        }
        tok.text += src[j];
        ++j;
      }
      tok.kind = quote == '"' ? TokKind::String : TokKind::Char;
      i = (j < n && src[j] == quote) ? j + 1 : j;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < n && ident_part(static_cast<unsigned char>(src[j]))) ++j;
      tok.kind = TokKind::Ident;
      tok.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                       (src[j] == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(src[j + 1])))))
        ++j;
      tok.kind = TokKind::Number;
      tok.text = std::string(src.substr(i, j - i));
      i = j;
    } else {
      tok.text = std::string(1, static_cast<char>(c));
      ++i;
    }
    tok.end = i;
    out.push_back(std::move(tok));
  }
  return out;
}

std::size_t match_close(Tokens tokens, std::size_t open) {
  if (open >= tokens.size()) return tokens.size();
  const char o = tokens[open].text[0];
  const char c = o == '(' ? ')' : o == '[' ? ']' : '}';
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (tokens[i].is(o)) ++depth;
    else if (tokens[i].is(c) && --depth == 0) return i;
  }
  return tokens.size();
}

std::vector<std::pair<std::size_t, std::size_t>> split_top_level(Tokens tokens, std::size_t begin,
                                                                 std::size_t end, bool angles) {
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  if (begin >= end) return parts;
  int depth = 0;
  std::size_t start = begin;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = tokens[i];
    if (t.is('(') || t.is('[') || t.is('{') || (angles && t.is('<'))) ++depth;
    else if (t.is(')') || t.is(']') || t.is('}') || (angles && t.is('>'))) --depth;
    else if (t.is(',') && depth == 0) {
      parts.emplace_back(start, i);
      start = i + 1;
    }
  }
  parts.emplace_back(start, end);
  return parts;
}

std::string type_text(Tokens tokens, std::size_t begin, std::size_t end) {
  std::string out;
  bool prev_word = false;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = tokens[i];
    const bool word = t.kind == TokKind::Ident || t.kind == TokKind::Number;
    if (word && prev_word) out += ' ';
    out += t.text;
    prev_word = word;
  }
  return out;
}

bool is_modifier(std::string_view w) noexcept {
  static constexpr std::array<std::string_view, 14> mods = {
      "public", "private",  "protected", "static",   "final",    "abstract", "synchronized",
      "native", "transient", "volatile", "default", "strictfp", "sealed",   "non"};
  for (auto m : mods)
    if (m == w) return true;
  return false;
}

bool is_statement_keyword(std::string_view w) noexcept {
  static constexpr std::array<std::string_view, 14> kws = {
      "if",   "for",  "while",  "switch", "catch", "synchronized", "return",
      "new",  "try",  "else",   "do",     "throw", "super",        "this"};
  for (auto k : kws)
    if (k == w) return true;
  return false;
}

}  // namespace weft::java
