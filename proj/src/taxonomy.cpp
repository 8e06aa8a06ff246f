#include <stdexcept>

#include "util.hpp"
#include "weft/errors.hpp"
#include "weft/weave.hpp"

namespace weft {

Taxonomy::Taxonomy(std::string root) {
  root = util::to_lower(util::trim(root));
  if (root.empty()) throw std::invalid_argument("taxonomy root must be non-empty");
  index_.emplace(root, 0);
  terms_.push_back(std::move(root));
  parent_.push_back(0);
  depth_.push_back(1);
}

Taxonomy Taxonomy::parse(std::string_view text) {
  std::optional<Taxonomy> t;
  std::vector<std::string> stack;  // stack[level] = last term seen at that level
  int line_no = 0;
  for (const auto& raw : util::split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (util::trim(line).empty()) continue;
    std::size_t spaces = 0;
    while (spaces < line.size() && line[spaces] == ' ') ++spaces;
    if (spaces < line.size() && line[spaces] == '\t')
      throw MalformedDocument("taxonomy line " + std::to_string(line_no) + ": tabs are not allowed");
    if (spaces % 2 != 0)
      throw MalformedDocument("taxonomy line " + std::to_string(line_no) + ": indentation must be a multiple of 2");
    const auto level = spaces / 2;
    const auto term = util::to_lower(util::trim(line));
    if (!t) {
      if (level != 0) throw MalformedDocument("taxonomy line " + std::to_string(line_no) + ": root must not be indented");
      t.emplace(term);
      stack.assign(1, term);
      continue;
    }
    if (level == 0) throw MalformedDocument("taxonomy line " + std::to_string(line_no) + ": second root '" + term + "'");
    if (level > stack.size())
      throw MalformedDocument("taxonomy line " + std::to_string(line_no) + ": indentation skips a level");
    if (t->contains(term)) throw MalformedDocument("taxonomy line " + std::to_string(line_no) + ": duplicate term '" + term + "'");
    t->add(term, stack[level - 1]);
    stack.resize(level);
    stack.push_back(term);
  }
  if (!t) throw MalformedDocument("taxonomy is empty");
  return std::move(*t);
}

void Taxonomy::add(std::string term, std::string_view parent) {
  term = util::to_lower(util::trim(term));
  const auto p = index_of(parent);
  if (term.empty()) throw std::invalid_argument("taxonomy term must be non-empty");
  if (index_.count(term)) throw std::invalid_argument("duplicate taxonomy term '" + term + "'");
  index_.emplace(term, terms_.size());
  terms_.push_back(std::move(term));
  parent_.push_back(p);
  depth_.push_back(depth_[p] + 1);
}

std::size_t Taxonomy::index_of(std::string_view term) const {
  auto it = index_.find(util::to_lower(term));
  if (it == index_.end()) throw TermNotFound(std::string(term));
  return it->second;
}

bool Taxonomy::contains(std::string_view term) const { return index_.count(util::to_lower(term)) > 0; }

int Taxonomy::depth(std::string_view term) const { return depth_[index_of(term)]; }

std::optional<std::string> Taxonomy::parent(std::string_view term) const {
  const auto i = index_of(term);
  if (i == 0) return std::nullopt;
  return terms_[parent_[i]];
}

std::string Taxonomy::lcs(std::string_view a, std::string_view b) const {
  auto i = index_of(a), j = index_of(b);
  while (depth_[i] > depth_[j]) i = parent_[i];
  while (depth_[j] > depth_[i]) j = parent_[j];
  while (i != j) {
    i = parent_[i];
    j = parent_[j];
  }
  return terms_[i];
}

double wu_palmer(std::string_view a, std::string_view b, const Taxonomy& t) {
  const int da = t.depth(a), db = t.depth(b);
  return 2.0 * t.depth(t.lcs(a, b)) / (da + db);
}

}  // namespace weft
