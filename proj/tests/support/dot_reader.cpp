#include "dot_reader.hpp"

#include <cctype>
#include <stdexcept>

namespace weft::testing {
namespace {

struct Token {
  enum Kind { Id, Sym, End } kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("dot: " + what + " at offset " + std::to_string(i));
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '"') {
      const auto start = i++;
      std::string text;
      while (true) {
        if (i >= s.size()) fail("unterminated string");
        if (s[i] == '\\' && i + 1 < s.size()) {
          if (s[i + 1] != '"') text += '\\';
          text += s[i + 1];
          i += 2;
        } else if (s[i] == '"') {
          ++i;
          break;
        } else {
          text += s[i++];
        }
      }
      out.push_back({Token::Id, text, start});
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      const auto start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '.')) ++i;
      out.push_back({Token::Id, std::string(s.substr(start, i - start)), start});
    } else if (c == '-' && i + 1 < s.size() && (s[i + 1] == '>' || s[i + 1] == '-')) {
      out.push_back({Token::Sym, std::string(s.substr(i, 2)), i});
      i += 2;
    } else if (std::string_view("{}[];=,").find(c) != std::string_view::npos) {
      out.push_back({Token::Sym, std::string(1, c), i});
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  DotGraph graph() {
    DotGraph g;
    const auto head = take_id();
    if (head == "digraph")
      g.directed = true;
    else if (head != "graph")
      fail("expected graph or digraph");
    if (peek().kind == Token::Id) g.name = take_id();
    expect("{");
    statements(g);
    expect("}");
    if (peek().kind != Token::End) fail("trailing input");
    return g;
  }

 private:
  const Token& peek() const { return toks_[at_]; }
  bool is(std::string_view sym) const { return peek().kind == Token::Sym && peek().text == sym; }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("dot: " + what + " at offset " + std::to_string(peek().pos));
  }

  void expect(std::string_view sym) {
    if (!is(sym)) fail("expected '" + std::string(sym) + "'");
    ++at_;
  }

  std::string take_id() {
    if (peek().kind != Token::Id) fail("expected identifier");
    return toks_[at_++].text;
  }

  std::map<std::string, std::string> attr_list() {
    std::map<std::string, std::string> attrs;
    while (is("[")) {
      ++at_;
      while (!is("]")) {
        auto key = take_id();
        expect("=");
        attrs[key] = take_id();
        if (is(",") || is(";")) ++at_;
      }
      expect("]");
    }
    return attrs;
  }

  void statements(DotGraph& g) {
    while (!is("}")) {
      if (peek().kind == Token::End) fail("unbalanced braces");
      statement(g);
      if (is(";")) ++at_;
    }
  }

  void statement(DotGraph& g) {
    if (peek().kind == Token::Id && peek().text == "subgraph") {
      ++at_;
      g.subgraphs.push_back(peek().kind == Token::Id ? take_id() : std::string());
      expect("{");
      statements(g);
      expect("}");
      return;
    }
    if (peek().kind == Token::Id && (peek().text == "node" || peek().text == "edge" || peek().text == "graph") &&
        toks_[at_ + 1].kind == Token::Sym && toks_[at_ + 1].text == "[") {
      ++at_;
      attr_list();
      return;
    }
    auto first = take_id();
    if (is("=")) {
      ++at_;
      take_id();
      return;
    }
    std::vector<std::string> chain{first};
    while (is("->") || is("--")) {
      if ((peek().text == "->") != g.directed) fail("edge operator does not match graph type");
      ++at_;
      chain.push_back(take_id());
    }
    auto attrs = attr_list();
    for (const auto& n : chain) g.nodes.insert(n);
    if (chain.size() == 1) {
      auto& slot = g.node_attrs[first];
      for (auto& [k, v] : attrs) slot[k] = v;
      return;
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) g.edges.push_back({chain[i], chain[i + 1], attrs});
  }

  std::vector<Token> toks_;
  std::size_t at_ = 0;
};

}  // namespace

DotGraph read_dot(std::string_view text) { return Parser(tokenize(text)).graph(); }

}  // namespace weft::testing
