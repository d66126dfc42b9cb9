#ifndef WB_NAMES_HPP
#define WB_NAMES_HPP

#include <set>
#include <string>
#include <vector>

namespace wb {

// Names are interned as plain strings.  Numeral names (all digits) identify
// network nodes / leader ids and sort before all other names, numerically.
struct Name {
  std::string text;

  Name() = default;
  Name(std::string t) : text(std::move(t)) {}
  Name(const char* t) : text(t) {}

  bool is_numeral() const;
  // The six names the encoder draws its fresh channels from.
  bool is_reserved() const;

  bool operator==(const Name& o) const { return text == o.text; }
  bool operator!=(const Name& o) const { return text != o.text; }
  bool operator<(const Name& o) const;
};

using NameSet = std::set<Name>;

// Deterministic fresh-name source.  freshen("x") yields x, x1, x2, ... that
// avoid every name registered so far.
class NameGen {
 public:
  NameGen() = default;
  explicit NameGen(const NameSet& avoid) : used_(avoid) {}

  void reserve(const Name& n) { used_.insert(n); }
  void reserve(const NameSet& ns) { used_.insert(ns.begin(), ns.end()); }
  Name fresh(const std::string& base);

 private:
  NameSet used_;
};

std::string quote_json(const std::string& s);

}  // namespace wb

#endif
