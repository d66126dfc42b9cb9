#include "wb/names.hpp"

#include <algorithm>
#include <cctype>

namespace wb {

bool Name::is_numeral() const {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

bool Name::is_reserved() const {
  return text.size() == 1 && std::string("cduvst").find(text[0]) != std::string::npos;
}

bool Name::operator<(const Name& o) const {
  bool an = is_numeral(), bn = o.is_numeral();
  if (an != bn) return an;  // numerals first
  if (an && bn) {
    if (text.size() != o.text.size()) return text.size() < o.text.size();
    return text < o.text;
  }
  return text < o.text;
}

Name NameGen::fresh(const std::string& base) {
  Name cand{base};
  for (unsigned long i = 0; used_.count(cand); ++i)
    cand = Name{base + std::to_string(i)};
  used_.insert(cand);
  return cand;
}

std::string quote_json(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace wb
