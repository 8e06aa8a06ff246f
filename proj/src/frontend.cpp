#include "weft/frontend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "java_lexer.hpp"
#include "util.hpp"
#include "weft/errors.hpp"

namespace weft {

using java::Token;
using java::Tokens;
using java::TokKind;

namespace {

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const noexcept { return begin >= end; }
  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

// ---------------------------------------------------------------------------
// URL / string expression folding

std::string format_to_template(std::string_view fmt) {
  std::string out;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out += fmt[i];
      continue;
    }
    if (i + 1 < fmt.size() && fmt[i + 1] == '%') {
      out += '%';
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < fmt.size() && std::string_view("-#+ 0,(.123456789").find(fmt[j]) != std::string_view::npos) ++j;
    if (j < fmt.size() && std::isalpha(static_cast<unsigned char>(fmt[j]))) {
      out += kWildcard;
      i = j;
    } else {
      out += '%';
    }
  }
  return out;
}

void collapse_wildcards(std::string& text) {
  const std::string doubled = std::string(kWildcard) + std::string(kWildcard);
  std::size_t pos;
  while ((pos = text.find(doubled)) != std::string::npos) text.erase(pos, kWildcard.size());
}

bool is_qualified_name(Tokens t, Range r) {
  if (r.empty() || !t[r.begin].is_ident()) return false;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    const bool expect_ident = ((i - r.begin) % 2) == 0;
    if (expect_ident ? !t[i].is_ident() : !t[i].is('.')) return false;
  }
  return (r.size() % 2) == 1;
}

struct Folded {
  std::string text;
  bool any_literal = false;
  bool fully_literal = true;
};

Folded fold_expression(Tokens t, Range r, const StringTable* known);

void fold_operand(Tokens t, Range r, const StringTable* known, Folded& acc) {
  if (r.empty()) {
    acc.fully_literal = false;
    acc.text += kWildcard;
    return;
  }
  if (r.size() == 1 && t[r.begin].kind == TokKind::String) {
    acc.text += t[r.begin].text;
    acc.any_literal = true;
    return;
  }
  if (r.size() == 1 && t[r.begin].is_ident() && known) {
    if (auto it = known->find(t[r.begin].text); it != known->end()) {
      acc.text += it->second;
      acc.any_literal = true;
      if (it->second.find(kWildcard) != std::string::npos) acc.fully_literal = false;
      return;
    }
  }
  // this.CONSTANT or Owner.CONSTANT
  if (r.size() == 3 && t[r.begin].is_ident() && t[r.begin + 1].is('.') && t[r.begin + 2].is_ident() &&
      known) {
    if (auto it = known->find(t[r.begin + 2].text); it != known->end()) {
      acc.text += it->second;
      acc.any_literal = true;
      if (it->second.find(kWildcard) != std::string::npos) acc.fully_literal = false;
      return;
    }
  }
  if (t[r.begin].is('(') && java::match_close(t, r.begin) == r.end - 1) {
    auto inner = fold_expression(t, {r.begin + 1, r.end - 1}, known);
    acc.text += inner.text;
    acc.any_literal = acc.any_literal || inner.any_literal;
    acc.fully_literal = acc.fully_literal && inner.fully_literal;
    return;
  }
  // String.format("...%s...", args)
  if (r.size() >= 6 && t[r.begin].is_ident("String") && t[r.begin + 1].is('.') &&
      t[r.begin + 2].is_ident("format") && t[r.begin + 3].is('(') &&
      t[r.begin + 4].kind == TokKind::String && java::match_close(t, r.begin + 3) == r.end - 1) {
    acc.text += format_to_template(t[r.begin + 4].text);
    acc.any_literal = true;
    acc.fully_literal = false;
    return;
  }
  acc.fully_literal = false;
  acc.text += kWildcard;
}

Folded fold_expression(Tokens t, Range r, const StringTable* known) {
  Folded acc;
  int depth = 0;
  std::size_t start = r.begin;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (t[i].is('(') || t[i].is('[') || t[i].is('{')) ++depth;
    else if (t[i].is(')') || t[i].is(']') || t[i].is('}')) --depth;
    else if (t[i].is('+') && depth == 0) {
      fold_operand(t, {start, i}, known, acc);
      start = i + 1;
    }
  }
  fold_operand(t, {start, r.end}, known, acc);
  collapse_wildcards(acc.text);
  return acc;
}

// Folds a URL expression. Entirely non-literal expressions yield `{*}`
// and a warning.
std::string fold_url(Tokens t, Range r, const StringTable* known, std::vector<std::string>& warnings) {
  auto folded = fold_expression(t, r, known);
  if (!folded.any_literal) {
    warnings.push_back("unresolved URL expression '" + java::type_text(t, r.begin, r.end) +
                       "' replaced by " + std::string(kWildcard));
    return std::string(kWildcard);
  }
  return folded.text;
}

std::vector<Range> call_args(Tokens t, std::size_t open, std::size_t close) {
  std::vector<Range> out;
  if (close <= open + 1) return out;
  for (auto [b, e] : java::split_top_level(t, open + 1, close)) out.push_back({b, e});
  return out;
}

std::optional<HttpMethod> method_from_expression(Tokens t, Range r) {
  if (r.empty()) return std::nullopt;
  const auto& last = t[r.end - 1];
  if (r.size() == 1 && last.kind == TokKind::String) return parse_http_method(last.text);
  if (is_qualified_name(t, r)) {
    auto m = parse_http_method(last.text);
    if (m && *m != HttpMethod::ANY && *m != HttpMethod::UNKNOWN) return m;
  }
  return std::nullopt;
}

bool contains(const std::vector<std::string>& list, std::string_view value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

struct ChainSegment {
  std::string name;
  std::size_t name_index;
  std::size_t open;
  std::size_t close;
};

// Follows `.name(args)` segments after the call closing at `close`.
std::vector<ChainSegment> follow_chain(Tokens t, std::size_t close, std::size_t limit) {
  std::vector<ChainSegment> chain;
  std::size_t i = close + 1;
  while (i + 2 < limit && t[i].is('.') && t[i + 1].is_ident() && t[i + 2].is('(')) {
    const auto c = java::match_close(t, i + 2);
    if (c >= limit) break;
    chain.push_back({t[i + 1].text, i + 1, i + 2, c});
    i = c + 1;
  }
  return chain;
}

std::string join_url_path(std::string base, std::string_view segment) {
  if (segment.empty()) return base;
  const bool base_slash = !base.empty() && base.back() == '/';
  const bool seg_slash = segment.front() == '/';
  if (base_slash && seg_slash) base.pop_back();
  else if (!base_slash && !seg_slash) base += '/';
  base += segment;
  return base;
}

struct Found {
  std::size_t index = 0;  // token index of the receiver, used for ordering
  LaastNode node;
  std::vector<std::size_t> consumed;  // method-name tokens owned by the idiom
  std::vector<std::string> warnings;
};

constexpr std::array<std::pair<std::string_view, HttpMethod>, 8> kRestTemplateMethods = {{
    {"getForObject", HttpMethod::GET},
    {"getForEntity", HttpMethod::GET},
    {"postForObject", HttpMethod::POST},
    {"postForEntity", HttpMethod::POST},
    {"postForLocation", HttpMethod::POST},
    {"put", HttpMethod::PUT},
    {"delete", HttpMethod::DELETE},
    {"patchForObject", HttpMethod::PATCH},
}};

HttpMethod verb_method(std::string_view verb) {
  std::string upper(verb);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return parse_http_method(upper).value_or(HttpMethod::UNKNOWN);
}

LaastNode make_remote(std::string client_method, HttpMethod method, std::string url, std::size_t args) {
  LaastNode call(NodeKind::Call, std::move(client_method));
  call.set_attribute("call_kind", "remote");
  call.set_attribute("http_method", std::string(to_string(method)));
  call.set_attribute("url_template", std::move(url));
  call.set_attribute("arg_count", std::to_string(args));
  return call;
}

std::optional<Found> rest_template_call(Tokens t, std::size_t i, std::size_t limit, const StringTable* known) {
  const auto name = t[i + 2].text;
  std::optional<HttpMethod> fixed;
  bool by_argument = false;
  for (auto [n, m] : kRestTemplateMethods)
    if (n == name) fixed = m;
  if (!fixed) {
    if (name == "exchange" || name == "execute") by_argument = true;
    else return std::nullopt;
  }
  const auto close = java::match_close(t, i + 3);
  if (close >= limit) return std::nullopt;
  Found f;
  f.index = i;
  f.consumed.push_back(i + 2);
  auto args = call_args(t, i + 3, close);
  std::string url = args.empty() ? std::string(kWildcard) : fold_url(t, args[0], known, f.warnings);
  if (args.empty()) f.warnings.push_back("remote call without URL argument");
  HttpMethod method = fixed.value_or(HttpMethod::UNKNOWN);
  if (by_argument && args.size() >= 2) method = method_from_expression(t, args[1]).value_or(HttpMethod::UNKNOWN);
  f.node = make_remote(name, method, std::move(url), args.size());
  return f;
}

std::optional<Found> web_client_call(Tokens t, std::size_t i, std::size_t limit, const StringTable* known) {
  static constexpr std::array<std::string_view, 6> verbs = {"get", "post", "put", "delete", "patch", "method"};
  const auto& verb = t[i + 2].text;
  if (std::find(verbs.begin(), verbs.end(), verb) == verbs.end()) return std::nullopt;
  const auto close = java::match_close(t, i + 3);
  if (close >= limit) return std::nullopt;
  Found f;
  f.index = i;
  f.consumed.push_back(i + 2);
  HttpMethod method = HttpMethod::UNKNOWN;
  if (verb == "method") {
    auto args = call_args(t, i + 3, close);
    if (!args.empty()) method = method_from_expression(t, args[0]).value_or(HttpMethod::UNKNOWN);
  } else {
    method = verb_method(verb);
  }
  std::optional<std::string> url;
  std::size_t arg_count = 0;
  for (const auto& seg : follow_chain(t, close, limit)) {
    if (seg.name == "uri" && !url) {
      f.consumed.push_back(seg.name_index);
      auto args = call_args(t, seg.open, seg.close);
      arg_count += args.size();
      bool lambda = false;
      if (!args.empty())
        for (std::size_t k = args[0].begin; k + 1 < args[0].end; ++k)
          if (t[k].is('-') && t[k + 1].is('>')) lambda = true;
      if (args.empty() || lambda) {
        f.warnings.push_back("unresolved URL expression in uri(...) replaced by " + std::string(kWildcard));
        url = std::string(kWildcard);
      } else {
        url = fold_url(t, args[0], known, f.warnings);
      }
    } else if (seg.name == "bodyValue" || seg.name == "body" || seg.name == "syncBody") {
      f.consumed.push_back(seg.name_index);
      arg_count += 1;
    }
  }
  if (!url) {
    f.warnings.push_back("web client call without uri(...); URL replaced by " + std::string(kWildcard));
    url = std::string(kWildcard);
  }
  f.node = make_remote(verb, method, std::move(*url), arg_count);
  return f;
}

std::optional<Found> jaxrs_client_call(Tokens t, std::size_t i, std::size_t limit, const StringTable* known) {
  if (t[i + 2].text != "target") return std::nullopt;
  const auto close = java::match_close(t, i + 3);
  if (close >= limit) return std::nullopt;
  Found f;
  f.index = i;
  f.consumed.push_back(i + 2);
  auto args = call_args(t, i + 3, close);
  std::size_t arg_count = args.size();
  std::string url = args.empty() ? std::string(kWildcard) : fold_url(t, args[0], known, f.warnings);
  HttpMethod method = HttpMethod::UNKNOWN;
  std::string verb_name = "target";
  for (const auto& seg : follow_chain(t, close, limit)) {
    auto seg_args = call_args(t, seg.open, seg.close);
    if (seg.name == "path") {
      f.consumed.push_back(seg.name_index);
      if (!seg_args.empty()) url = join_url_path(url, fold_expression(t, seg_args[0], known).text);
      collapse_wildcards(url);
    } else if (seg.name == "get" || seg.name == "post" || seg.name == "put" || seg.name == "delete") {
      f.consumed.push_back(seg.name_index);
      method = verb_method(seg.name);
      arg_count += seg_args.size();
      verb_name = seg.name;
      break;
    } else if (seg.name == "method") {
      f.consumed.push_back(seg.name_index);
      if (!seg_args.empty()) method = method_from_expression(t, seg_args[0]).value_or(HttpMethod::UNKNOWN);
      arg_count += seg_args.empty() ? 0 : seg_args.size() - 1;
      verb_name = seg.name;
      break;
    } else if (seg.name == "request" || seg.name == "queryParam" || seg.name == "resolveTemplate" ||
               seg.name == "header" || seg.name == "accept") {
      f.consumed.push_back(seg.name_index);
    }
  }
  f.node = make_remote(verb_name, method, std::move(url), arg_count);
  return f;
}

std::vector<Found> find_remote_calls(Tokens t, Range r, const ClientIdioms& idioms, const StringTable* known) {
  std::vector<Found> out;
  for (std::size_t i = r.begin; i + 3 < r.end; ++i) {
    if (!t[i].is_ident() || !t[i + 1].is('.') || !t[i + 2].is_ident() || !t[i + 3].is('(')) continue;
    std::optional<Found> f;
    if (contains(idioms.rest_template_receivers, t[i].text)) f = rest_template_call(t, i, r.end, known);
    else if (contains(idioms.web_client_receivers, t[i].text)) f = web_client_call(t, i, r.end, known);
    else if (contains(idioms.jaxrs_client_receivers, t[i].text)) f = jaxrs_client_call(t, i, r.end, known);
    if (f) out.push_back(std::move(*f));
  }
  return out;
}

std::vector<Found> find_event_publishes(Tokens t, Range r, const ClientIdioms& idioms, const StringTable* known) {
  std::vector<Found> out;
  for (std::size_t i = r.begin; i + 3 < r.end; ++i) {
    if (!t[i].is_ident() || !t[i + 1].is('.') || !t[i + 2].is_ident() || !t[i + 3].is('(')) continue;
    for (const auto& pub : idioms.publishers) {
      if (pub.receiver != t[i].text || pub.method != t[i + 2].text) continue;
      const auto close = java::match_close(t, i + 3);
      if (close >= r.end) break;
      Found f;
      f.index = i;
      f.consumed.push_back(i + 2);
      auto args = call_args(t, i + 3, close);
      std::size_t topic_arg = pub.topic_arg >= 0 ? static_cast<std::size_t>(pub.topic_arg)
                              : args.size() >= 3 ? 1
                                                 : 0;
      std::string topic(kWildcard);
      if (topic_arg < args.size()) {
        auto folded = fold_expression(t, args[topic_arg], known);
        if (folded.any_literal && folded.text.find(kWildcard) == std::string::npos && !folded.text.empty())
          topic = folded.text;
      }
      if (topic == kWildcard) f.warnings.push_back("unresolved event topic in " + pub.receiver + "." + pub.method);
      LaastNode call(NodeKind::Call, pub.method);
      call.set_attribute("call_kind", "event");
      call.set_attribute("direction", "Publish");
      call.set_attribute("topic", topic);
      call.set_attribute("arg_count", std::to_string(args.size()));
      f.node = std::move(call);
      out.push_back(std::move(f));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotations

struct AnnotationParse {
  std::optional<RecognizedAnnotation> annotation;
  std::size_t next = 0;
};

std::optional<std::string> annotation_value(Tokens t, Range r, const StringTable* constants) {
  if (r.empty()) return std::nullopt;
  if (t[r.begin].is('{') && java::match_close(t, r.begin) == r.end - 1) {
    std::vector<std::string> values;
    if (r.size() > 2) {
      for (auto [b, e] : java::split_top_level(t, r.begin + 1, r.end - 1)) {
        if (b == e) continue;  // trailing comma
        auto v = annotation_value(t, {b, e}, constants);
        if (!v) return std::nullopt;
        values.push_back(std::move(*v));
      }
    }
    return util::join(values, "|");
  }
  if (r.size() == 1) {
    const auto& tok = t[r.begin];
    if (tok.kind == TokKind::String || tok.kind == TokKind::Number || tok.kind == TokKind::Char) return tok.text;
    if (tok.is_ident()) {
      if (constants)
        if (auto it = constants->find(tok.text); it != constants->end()) return it->second;
      return tok.text;
    }
    return std::nullopt;
  }
  if (is_qualified_name(t, r)) {
    if (t[r.end - 1].is_ident("class")) return java::type_text(t, r.end - 3, r.end);
    if (constants)
      if (auto it = constants->find(t[r.end - 1].text); it != constants->end()) return it->second;
    return t[r.end - 1].text;
  }
  // negative numbers
  if (r.size() == 2 && t[r.begin].is('-') && t[r.begin + 1].kind == TokKind::Number) return "-" + t[r.begin + 1].text;
  // constant folding of string concatenations
  bool has_plus = false;
  for (std::size_t i = r.begin; i < r.end; ++i) has_plus = has_plus || t[i].is('+');
  if (has_plus) {
    auto folded = fold_expression(t, r, constants);
    if (folded.fully_literal) return folded.text;
  }
  return std::nullopt;
}

// `t[i]` is '@'. Returns std::nullopt annotation for `@interface`.
AnnotationParse parse_annotation(Tokens t, std::size_t i, std::size_t limit, const StringTable* constants,
                                 std::vector<std::string>& warnings) {
  AnnotationParse out;
  std::size_t j = i + 1;
  if (j >= limit || !t[j].is_ident() || t[j].text == "interface") {
    out.next = j;
    return out;
  }
  std::string name = t[j].text;
  ++j;
  while (j + 1 < limit && t[j].is('.') && t[j + 1].is_ident()) {
    name = t[j + 1].text;
    j += 2;
  }
  RecognizedAnnotation ann{name, {}};
  if (j < limit && t[j].is('(')) {
    const auto close = java::match_close(t, j);
    if (close >= limit) {
      warnings.push_back("unterminated arguments of @" + name);
      out.annotation = std::move(ann);
      out.next = limit;
      return out;
    }
    bool ok = true;
    Attributes args;
    auto parts = java::split_top_level(t, j + 1, close);
    if (close > j + 1) {
      const bool named = parts.front().second - parts.front().first >= 2 && t[parts.front().first].is_ident() &&
                         t[parts.front().first + 1].is('=');
      if (!named && parts.size() == 1) {
        auto v = annotation_value(t, {parts[0].first, parts[0].second}, constants);
        if (v) args.emplace_back("value", std::move(*v));
        else ok = false;
      } else {
        for (auto [b, e] : parts) {
          if (e - b < 3 || !t[b].is_ident() || !t[b + 1].is('=')) {
            ok = false;
            break;
          }
          auto v = annotation_value(t, {b + 2, e}, constants);
          if (!v) {
            ok = false;
            break;
          }
          args.emplace_back(t[b].text, std::move(*v));
        }
      }
    }
    if (ok) ann.arguments = std::move(args);
    else warnings.push_back("unrecognized arguments of @" + name + " ignored");
    j = close + 1;
  }
  out.annotation = std::move(ann);
  out.next = j;
  return out;
}

LaastNode annotation_node(const RecognizedAnnotation& a, const std::string& file, int line) {
  LaastNode node(NodeKind::Annotation, a.name);
  node.attributes = a.arguments;
  node.span = SourceSpan{file, line, line};
  return node;
}

// ---------------------------------------------------------------------------
// Java structure

struct FieldInfo {
  std::string name;
  std::string type;
  bool is_static = false;
  bool is_final = false;
  Range init;
};

struct MethodBody {
  std::size_t node_index;  // into the TypeDecl children
  Range body;
};

bool is_type_keyword(const Token& t) {
  return t.is_ident("class") || t.is_ident("interface") || t.is_ident("enum") || t.is_ident("record");
}

std::string strip_generics(std::string_view type) {
  auto lt = type.find('<');
  std::string base(type.substr(0, lt));
  auto dot = base.rfind('.');
  if (dot != std::string::npos) base = base.substr(dot + 1);
  return base;
}

class JavaFileExtractor {
 public:
  JavaFileExtractor(std::string_view source, const std::string& file, const ClientIdioms& idioms,
                    std::vector<Warning>& warnings)
      : tokens_(java::lex(source)), t_(tokens_), file_(file), idioms_(idioms), warnings_(warnings) {
    line_count_ = 1;
    for (char c : source)
      if (c == '\n') ++line_count_;
    if (!source.empty() && source.back() == '\n') --line_count_;
    prescan_constants();
  }

  LaastNode run() {
    LaastNode unit(NodeKind::CompilationUnit, file_);
    unit.span = SourceSpan{file_, 1, std::max(1, line_count_)};
    std::vector<LaastNode> pending;
    std::optional<std::size_t> decl_start;
    const auto n = t_.size();
    std::size_t i = 0;
    while (i < n) {
      const auto& tok = t_[i];
      if (tok.is_ident("package")) {
        std::string pkg;
        std::size_t j = i + 1;
        for (; j < n && !t_[j].is(';'); ++j) pkg += t_[j].text;
        unit.set_attribute("package", pkg);
        i = j + 1;
      } else if (tok.is_ident("import")) {
        while (i < n && !t_[i].is(';')) ++i;
        ++i;
      } else if (tok.is('@')) {
        if (i + 1 < n && t_[i + 1].is_ident("interface")) {
          i = skip_type_body(i);
          pending.clear();
          decl_start.reset();
          continue;
        }
        if (!decl_start) decl_start = i;
        i = take_annotation(i, n, pending);
      } else if (tok.is_ident() && java::is_modifier(tok.text)) {
        if (!decl_start) decl_start = i;
        ++i;
      } else if (is_type_keyword(tok) && i + 1 < n && t_[i + 1].is_ident()) {
        const auto start = decl_start.value_or(i);
        auto [node, next] = parse_type(i, start, std::move(pending));
        unit.children.push_back(std::move(node));
        pending.clear();
        decl_start.reset();
        i = next;
      } else {
        ++i;
      }
    }
    return unit;
  }

 private:
  void warn(int line, std::string message) { warnings_.push_back({file_, line, std::move(message)}); }

  std::size_t take_annotation(std::size_t i, std::size_t limit, std::vector<LaastNode>& into,
                              const StringTable* constants = nullptr) {
    std::vector<std::string> w;
    auto parsed = parse_annotation(t_, i, limit, constants ? constants : &constants_, w);
    for (auto& m : w) warn(t_[i].line, std::move(m));
    if (parsed.annotation) into.push_back(annotation_node(*parsed.annotation, file_, t_[i].line));
    return std::max(parsed.next, i + 1);
  }

  std::size_t skip_type_body(std::size_t i) {
    while (i < t_.size() && !t_[i].is('{')) ++i;
    return i < t_.size() ? java::match_close(t_, i) + 1 : i;
  }

  std::size_t skip_angles(std::size_t i) {
    int depth = 0;
    for (; i < t_.size(); ++i) {
      if (t_[i].is('<')) ++depth;
      else if (t_[i].is('>') && --depth == 0) return i + 1;
    }
    return i;
  }

  std::pair<LaastNode, std::size_t> parse_type(std::size_t kw, std::size_t start, std::vector<LaastNode> annotations) {
    const auto n = t_.size();
    const std::string type_kind = t_[kw].text;
    LaastNode type(NodeKind::TypeDecl, t_[kw + 1].text);
    type.set_attribute("type_kind", type_kind);
    std::size_t j = kw + 2;
    if (j < n && t_[j].is('<')) j = skip_angles(j);
    Range record_header;
    if (type_kind == "record" && j < n && t_[j].is('(')) {
      const auto c = java::match_close(t_, j);
      record_header = {j + 1, c};
      j = c + 1;
    }
    std::vector<LaastNode> supertypes;
    std::string relation;
    while (j < n && !t_[j].is('{')) {
      if (t_[j].is_ident("extends") || t_[j].is_ident("implements") || t_[j].is_ident("permits")) {
        relation = t_[j].text;
        ++j;
        std::size_t end = j;
        int depth = 0;
        while (end < n && !t_[end].is('{')) {
          if (t_[end].is('<')) ++depth;
          else if (t_[end].is('>')) --depth;
          else if (depth == 0 && (t_[end].is_ident("extends") || t_[end].is_ident("implements") ||
                                  t_[end].is_ident("permits")))
            break;
          ++end;
        }
        if (relation != "permits") {
          for (auto [b, e] : java::split_top_level(t_, j, end, true)) {
            if (b == e) continue;
            LaastNode ref(NodeKind::TypeRef, java::type_text(t_, b, e));
            ref.set_attribute("relation", relation);
            ref.span = SourceSpan{file_, t_[b].line, t_[b].line};
            supertypes.push_back(std::move(ref));
          }
        }
        j = end;
      } else {
        ++j;
      }
    }
    if (j >= n) {
      warn(t_[kw].line, "type " + *type.name + " has no body");
      type.span = SourceSpan{file_, t_[start].line, t_[n - 1].line};
      for (auto& a : annotations) type.children.push_back(std::move(a));
      return {std::move(type), n};
    }
    const auto close = java::match_close(t_, j);
    const auto end_line = close < n ? t_[close].line : t_[n - 1].line;
    type.span = SourceSpan{file_, t_[start].line, end_line};
    for (auto& a : annotations) type.children.push_back(std::move(a));
    for (auto& s : supertypes) type.children.push_back(std::move(s));

    fields_.clear();
    bodies_.clear();
    method_names_.clear();
    if (!record_header.empty()) {
      for (auto [b, e] : java::split_top_level(t_, record_header.begin, record_header.end, true)) {
        auto node = parse_param(b, e, NodeKind::FieldDecl);
        if (node) {
          fields_.push_back({*node->name, node->attribute_or("declared_type", ""), false, true, {}});
          type.children.push_back(std::move(*node));
        }
      }
    }
    parse_members(j + 1, std::min(close, n), type_kind, type);
    process_bodies(type);
    return {std::move(type), close < n ? close + 1 : n};
  }

  // Param-shaped declaration: annotations, modifiers, type, name.
  std::optional<LaastNode> parse_param(std::size_t b, std::size_t e, NodeKind kind) {
    std::vector<LaastNode> anns;
    std::size_t k = b;
    while (k < e) {
      if (t_[k].is('@')) k = take_annotation(k, e, anns);
      else if (t_[k].is_ident("final")) ++k;
      else break;
    }
    if (k >= e || !t_[e - 1].is_ident()) {
      if (k < e) warn(t_[k].line, "unrecognized parameter declaration");
      return std::nullopt;
    }
    LaastNode node(kind, t_[e - 1].text);
    std::string type = java::type_text(t_, k, e - 1);
    node.set_attribute("declared_type", type);
    node.span = SourceSpan{file_, t_[e - 1].line, t_[e - 1].line};
    for (auto& a : anns) node.children.push_back(std::move(a));
    return node;
  }

  void parse_members(std::size_t begin, std::size_t end, const std::string& type_kind, LaastNode& type) {
    std::size_t k = begin;
    if (type_kind == "enum") {
      int depth = 0;
      while (k < end) {
        if (t_[k].is('(') || t_[k].is('{')) ++depth;
        else if (t_[k].is(')') || t_[k].is('}')) --depth;
        else if (t_[k].is(';') && depth == 0) break;
        ++k;
      }
      ++k;
    }
    std::vector<LaastNode> pending;
    std::vector<std::string> modifiers;
    std::optional<std::size_t> member_start;
    auto reset = [&] {
      pending.clear();
      modifiers.clear();
      member_start.reset();
    };
    while (k < end) {
      const auto& tok = t_[k];
      if (tok.is(';')) {
        reset();
        ++k;
      } else if (tok.is('@')) {
        if (k + 1 < end && t_[k + 1].is_ident("interface")) {
          k = skip_type_body(k);
          reset();
          continue;
        }
        if (!member_start) member_start = k;
        k = take_annotation(k, end, pending);
      } else if (tok.is_ident() && java::is_modifier(tok.text)) {
        if (!member_start) member_start = k;
        modifiers.push_back(tok.text == "non" ? "non-sealed" : tok.text);
        ++k;
        if (tok.text == "non" && k + 1 < end && t_[k].is('-')) k += 2;
      } else if (is_type_keyword(tok) && k + 1 < end && t_[k + 1].is_ident()) {
        k = skip_type_body(k);
        reset();
      } else if (tok.is('{')) {
        k = java::match_close(t_, k) + 1;
        reset();
      } else if (tok.is('<')) {
        if (!member_start) member_start = k;
        k = skip_angles(k);
      } else if (tok.is('}')) {
        ++k;
        reset();
      } else {
        if (!member_start) member_start = k;
        k = parse_declaration(k, end, *member_start, pending, modifiers, type);
        reset();
      }
    }
  }

  std::size_t parse_declaration(std::size_t k, std::size_t end, std::size_t start, std::vector<LaastNode>& anns,
                                const std::vector<std::string>& modifiers, LaastNode& type) {
    std::size_t m = k;
    int angle = 0;
    while (m < end) {
      const auto& tok = t_[m];
      if (tok.is('<')) ++angle;
      else if (tok.is('>')) --angle;
      else if (angle <= 0 && (tok.is('(') || tok.is('=') || tok.is(';') || tok.is(',') || tok.is('{') || tok.is('}')))
        break;
      ++m;
    }
    if (m >= end || m == k || !t_[m - 1].is_ident()) {
      if (m < end && t_[m].is('{')) return java::match_close(t_, m) + 1;
      return std::max(m, k + 1);
    }
    const auto joined_modifiers = util::join(modifiers, " ");
    if (t_[m].is('(')) {
      LaastNode method(NodeKind::MethodDecl, t_[m - 1].text);
      const bool ctor = (m - 1 == k);
      if (ctor) method.set_attribute("constructor", "true");
      else method.set_attribute("return_type", java::type_text(t_, k, m - 1));
      if (!joined_modifiers.empty()) method.set_attribute("modifiers", joined_modifiers);
      for (auto& a : anns) method.children.push_back(std::move(a));
      const auto pclose = java::match_close(t_, m);
      if (pclose >= end) return end;
      if (pclose > m + 1) {
        std::set<std::string> seen;
        for (auto [b, e] : java::split_top_level(t_, m + 1, pclose, true)) {
          if (b == e) continue;
          auto p = parse_param(b, e, NodeKind::Param);
          if (!p) continue;
          if (!seen.insert(*p->name).second) {
            warn(p->span->line_start, "duplicate parameter name '" + *p->name + "'");
            continue;
          }
          method.children.push_back(std::move(*p));
        }
      }
      std::size_t q = pclose + 1;
      while (q < end && !t_[q].is('{') && !t_[q].is(';')) ++q;
      int end_line = t_[std::min(q, end - 1)].line;
      std::optional<Range> body;
      std::size_t next = q + 1;
      if (q < end && t_[q].is('{')) {
        const auto bclose = java::match_close(t_, q);
        body = Range{q + 1, std::min(bclose, end)};
        end_line = t_[std::min(bclose, end - 1)].line;
        next = bclose + 1;
      }
      method.span = SourceSpan{file_, t_[start].line, end_line};
      if (!ctor) method_names_.insert(*method.name);
      type.children.push_back(std::move(method));
      if (body) bodies_.push_back({type.children.size() - 1, *body});
      return next;
    }

    // field declarators
    const std::string declared = java::type_text(t_, k, m - 1);
    const bool is_static = std::find(modifiers.begin(), modifiers.end(), "static") != modifiers.end();
    const bool is_final = std::find(modifiers.begin(), modifiers.end(), "final") != modifiers.end();
    std::size_t name_idx = m - 1;
    std::size_t p = m;
    while (true) {
      Range init;
      if (p < end && t_[p].is('=')) {
        std::size_t q = p + 1;
        int depth = 0;
        while (q < end) {
          if (t_[q].is('(') || t_[q].is('{') || t_[q].is('[')) ++depth;
          else if (t_[q].is(')') || t_[q].is('}') || t_[q].is(']')) --depth;
          else if (depth == 0 && (t_[q].is(',') || t_[q].is(';'))) break;
          ++q;
        }
        init = {p + 1, q};
        p = q;
      }
      LaastNode field(NodeKind::FieldDecl, t_[name_idx].text);
      field.set_attribute("declared_type", declared);
      if (!joined_modifiers.empty()) field.set_attribute("modifiers", joined_modifiers);
      for (const auto& a : anns) field.children.push_back(a);
      field.span = SourceSpan{file_, t_[start].line, t_[std::min(p, end - 1)].line};
      fields_.push_back({t_[name_idx].text, declared, is_static, is_final, init});
      type.children.push_back(std::move(field));
      if (p < end && t_[p].is(',') && p + 1 < end && t_[p + 1].is_ident()) {
        name_idx = p + 1;
        p = p + 2;
        continue;
      }
      break;
    }
    while (p < end && !t_[p].is(';')) ++p;
    return p + 1;
  }

  // `static final String NAME = <literal expression>;` anywhere in the file,
  // in declaration order. Constants of other files are never resolved.
  void prescan_constants() {
    for (std::size_t i = 2; i + 1 < t_.size(); ++i) {
      if (!t_[i].is('=') || !t_[i - 1].is_ident() || !t_[i - 2].is_ident("String")) continue;
      bool is_static = false, is_final = false;
      for (std::size_t b = i - 2; b-- > 0 && t_[b].is_ident() && java::is_modifier(t_[b].text);) {
        is_static = is_static || t_[b].text == "static";
        is_final = is_final || t_[b].text == "final";
      }
      if (!is_static || !is_final) continue;
      std::size_t q = i + 1;
      while (q < t_.size() && !t_[q].is(';')) ++q;
      auto folded = fold_expression(t_, {i + 1, q}, &constants_);
      if (folded.fully_literal) constants_.emplace(t_[i - 1].text, folded.text);
    }
  }

  ClientIdioms idioms_for_type() const {
    ClientIdioms idioms = idioms_;
    for (const auto& f : fields_) {
      const auto base = strip_generics(f.type);
      if (base == "RestTemplate") idioms.rest_template_receivers.push_back(f.name);
      else if (base == "WebClient") idioms.web_client_receivers.push_back(f.name);
      else if (base == "Client") idioms.jaxrs_client_receivers.push_back(f.name);
      else if (base == "KafkaTemplate") idioms.publishers.push_back({f.name, "send", 0});
      else if (base == "RabbitTemplate") idioms.publishers.push_back({f.name, "convertAndSend", -1});
    }
    return idioms;
  }

  void process_bodies(LaastNode& type) {
    const auto idioms = idioms_for_type();
    std::map<std::string, std::string, std::less<>> field_types;
    for (const auto& f : fields_) field_types.emplace(f.name, f.type);
    for (const auto& mb : bodies_) {
      LaastNode block(NodeKind::Block);
      const int first = mb.body.begin < t_.size() ? t_[mb.body.begin > 0 ? mb.body.begin - 1 : 0].line : 1;
      const int last = mb.body.end < t_.size() ? t_[mb.body.end].line : first;
      block.span = SourceSpan{file_, first, std::max(first, last)};
      StringTable locals = constants_;
      std::size_t stmt = mb.body.begin;
      int depth = 0;
      for (std::size_t i = mb.body.begin; i <= mb.body.end; ++i) {
        const bool at_end = i == mb.body.end;
        if (!at_end) {
          if (t_[i].is('(') || t_[i].is('[')) ++depth;
          else if (t_[i].is(')') || t_[i].is(']')) --depth;
        }
        if (at_end || (depth == 0 && (t_[i].is(';') || t_[i].is('{') || t_[i].is('}')))) {
          if (i > stmt) process_statement({stmt, i}, idioms, field_types, locals, block);
          stmt = i + 1;
        }
      }
      if (!block.children.empty()) type.children[mb.node_index].children.push_back(std::move(block));
    }
  }

  void process_statement(Range r, const ClientIdioms& idioms,
                         const std::map<std::string, std::string, std::less<>>& field_types, StringTable& locals,
                         LaastNode& block) {
    // local string variables feed URL folding of later statements
    std::size_t s = r.begin;
    if (s < r.end && t_[s].is_ident("final")) ++s;
    if (s + 3 < r.end && (t_[s].is_ident("String") || t_[s].is_ident("var")) && t_[s + 1].is_ident() &&
        t_[s + 2].is('=')) {
      auto folded = fold_expression(t_, {s + 3, r.end}, &locals);
      if (folded.any_literal) locals[t_[s + 1].text] = folded.text;
      else locals.erase(t_[s + 1].text);
    }

    std::vector<Found> found = find_remote_calls(t_, r, idioms, &locals);
    auto events = find_event_publishes(t_, r, idioms, &locals);
    for (auto& e : events) found.push_back(std::move(e));
    std::set<std::size_t> consumed;
    for (const auto& f : found) consumed.insert(f.consumed.begin(), f.consumed.end());

    for (std::size_t p = r.begin; p + 1 < r.end; ++p) {
      if (!t_[p].is_ident() || !t_[p + 1].is('(') || consumed.count(p)) continue;
      const auto& name = t_[p].text;
      if (java::is_statement_keyword(name)) continue;
      if (p > r.begin && t_[p - 1].is_ident("new")) continue;
      std::optional<std::string> receiver;
      bool qualified = p > r.begin && t_[p - 1].is('.');
      if (qualified) {
        if (p < r.begin + 2 || !t_[p - 2].is_ident()) continue;
        const auto& recv = t_[p - 2].text;
        const bool chained = p >= r.begin + 3 && t_[p - 3].is('.');
        const bool via_this = chained && p >= r.begin + 4 && t_[p - 4].is_ident("this");
        if (recv == "this" && !chained) {
          qualified = false;
        } else if ((!chained || via_this) && field_types.count(recv)) {
          receiver = recv;
        } else {
          continue;
        }
      }
      if (!qualified && !method_names_.count(name)) continue;
      const auto close = java::match_close(t_, p + 1);
      Found f;
      f.index = p;
      LaastNode call(NodeKind::Call, name);
      call.set_attribute("call_kind", "local");
      if (receiver) {
        call.set_attribute("receiver", *receiver);
        call.set_attribute("receiver_type", strip_generics(field_types.find(*receiver)->second));
      }
      call.set_attribute("arg_count", std::to_string(call_args(t_, p + 1, std::min(close, r.end)).size()));
      f.node = std::move(call);
      found.push_back(std::move(f));
    }

    std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.index < b.index; });
    for (auto& f : found) {
      const int line = t_[f.index].line;
      for (auto& w : f.warnings) warn(line, std::move(w));
      f.node.span = SourceSpan{file_, line, line};
      block.children.push_back(std::move(f.node));
    }
  }

  std::vector<Token> tokens_;
  Tokens t_;
  const std::string& file_;
  const ClientIdioms& idioms_;
  std::vector<Warning>& warnings_;
  int line_count_ = 1;

  // per-type state
  std::vector<FieldInfo> fields_;
  std::vector<MethodBody> bodies_;
  std::set<std::string> method_names_;
  StringTable constants_;
};

bool glob_impl(std::string_view p, std::string_view s) {
  while (!p.empty()) {
    if (p.substr(0, 2) == "**") {
      auto rest = p.substr(2);
      if (!rest.empty() && rest.front() == '/') {
        rest.remove_prefix(1);
        if (glob_impl(rest, s)) return true;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (s[i] == '/' && glob_impl(rest, s.substr(i + 1))) return true;
        return false;
      }
      for (std::size_t i = 0; i <= s.size(); ++i)
        if (glob_impl(rest, s.substr(i))) return true;
      return false;
    }
    if (p.front() == '*') {
      auto rest = p.substr(1);
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (glob_impl(rest, s.substr(i))) return true;
        if (i < s.size() && s[i] == '/') break;
      }
      return false;
    }
    if (s.empty()) return false;
    if (p.front() == '?') {
      if (s.front() == '/') return false;
    } else if (p.front() != s.front()) {
      return false;
    }
    p.remove_prefix(1);
    s.remove_prefix(1);
  }
  return s.empty();
}

}  // namespace

std::string_view to_string(Convention convention) noexcept {
  switch (convention) {
    case Convention::SpringLike: return "SpringLike";
    case Convention::JaxRsLike: return "JaxRsLike";
    case Convention::LaastPassthrough: return "LaastPassthrough";
  }
  return "SpringLike";
}

std::optional<Convention> parse_convention(std::string_view text) noexcept {
  if (text == "SpringLike") return Convention::SpringLike;
  if (text == "JaxRsLike") return Convention::JaxRsLike;
  if (text == "LaastPassthrough") return Convention::LaastPassthrough;
  return std::nullopt;
}

std::vector<std::string> default_globs(Convention convention) {
  if (convention == Convention::LaastPassthrough) return {"**/*.laast.json"};
  return {"**/*.java"};
}

bool glob_match(std::string_view pattern, std::string_view path) noexcept { return glob_impl(pattern, path); }

AnnotationScan recognize_annotation(std::string_view text, const StringTable* constants) {
  AnnotationScan scan;
  const auto tokens = java::lex(text);
  Tokens t(tokens);
  std::size_t i = 0;
  while (i < t.size()) {
    if (!t[i].is('@')) {
      ++i;
      continue;
    }
    auto parsed = parse_annotation(t, i, t.size(), constants, scan.warnings);
    if (parsed.annotation) scan.annotations.push_back(std::move(*parsed.annotation));
    i = std::max(parsed.next, i + 1);
  }
  return scan;
}

CallScan recognize_remote_call(std::string_view statement, const ClientIdioms& idioms, const StringTable* known) {
  CallScan scan;
  const auto tokens = java::lex(statement);
  auto found = find_remote_calls(tokens, {0, tokens.size()}, idioms, known);
  if (!found.empty()) {
    scan.call = std::move(found.front().node);
    scan.warnings = std::move(found.front().warnings);
  }
  return scan;
}

CallScan recognize_event_publish(std::string_view statement, const ClientIdioms& idioms, const StringTable* known) {
  CallScan scan;
  const auto tokens = java::lex(statement);
  auto found = find_event_publishes(tokens, {0, tokens.size()}, idioms, known);
  if (!found.empty()) {
    scan.call = std::move(found.front().node);
    scan.warnings = std::move(found.front().warnings);
  }
  return scan;
}

LaastNode extract_java_source(std::string_view source, const std::string& relative_path, const ClientIdioms& idioms,
                              std::vector<Warning>& warnings) {
  JavaFileExtractor extractor(source, relative_path, idioms, warnings);
  return extractor.run();
}

Extraction extract(const SourceTree& tree, const ClientIdioms& idioms, unsigned jobs) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(tree.root_dir, ec))
    throw IoError("service root is not a readable directory: " + tree.root_dir.generic_string());

  const auto globs = tree.include_globs.empty() ? default_globs(tree.convention) : tree.include_globs;
  std::vector<std::string> files;
  fs::recursive_directory_iterator it(tree.root_dir, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw IoError("cannot list " + tree.root_dir.generic_string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file(ec)) continue;
    auto rel = fs::relative(it->path(), tree.root_dir, ec).generic_string();
    if (ec) continue;
    for (const auto& g : globs) {
      if (glob_match(g, rel)) {
        files.push_back(std::move(rel));
        break;
      }
    }
  }
  std::sort(files.begin(), files.end());

  struct FileResult {
    std::optional<LaastNode> unit;
    std::optional<std::string> skip_reason;
    std::vector<Warning> warnings;
  };
  std::vector<FileResult> results(files.size());
  util::parallel_for(files.size(), jobs, [&](std::size_t i) {
    auto& res = results[i];
    const auto& rel = files[i];
    try {
      const auto text = util::read_file(tree.root_dir / rel);
      if (!util::is_valid_utf8(text)) {
        res.skip_reason = "not valid UTF-8";
        return;
      }
      if (tree.convention == Convention::LaastPassthrough) res.unit = load_laast(text);
      else res.unit = extract_java_source(text, rel, idioms, res.warnings);
    } catch (const IoError& e) {
      res.skip_reason = std::string("unreadable: ") + e.what();
    } catch (const std::exception& e) {
      res.skip_reason = e.what();
    }
  });

  Extraction out;
  out.root = LaastNode(NodeKind::CompilationUnit, tree.service_name);
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto& res = results[i];
    for (auto& w : res.warnings) out.report.warnings.push_back(std::move(w));
    if (res.skip_reason) {
      out.report.files_skipped.push_back({files[i], *res.skip_reason});
      out.report.warnings.push_back({files[i], 0, "skipped: " + *res.skip_reason});
      continue;
    }
    ++out.report.files_scanned;
    out.root.children.push_back(std::move(*res.unit));
  }
  out.report.nodes_emitted = count_nodes(out.root);
  return out;
}

}  // namespace weft
