#include "hsg/multi_index.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hsg {

MultiIndex::MultiIndex(std::initializer_list<Entry> entries) : entries_(entries) { canonicalize(); }

MultiIndex::MultiIndex(std::vector<Entry> entries) : entries_(std::move(entries)) { canonicalize(); }

void MultiIndex::canonicalize() {
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0; });
  std::sort(entries_.begin(), entries_.end());
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].first == entries_[i - 1].first)
      throw std::invalid_argument("duplicate dimension in multi-index");
}

MultiIndex MultiIndex::unit(std::uint32_t dim, std::uint32_t exponent) {
  MultiIndex nu;
  if (exponent != 0) nu.entries_.emplace_back(dim, exponent);
  return nu;
}

MultiIndex MultiIndex::from_dense(const std::vector<std::uint32_t>& exponents) {
  MultiIndex nu;
  for (std::uint32_t j = 0; j < exponents.size(); ++j)
    if (exponents[j] != 0) nu.entries_.emplace_back(j, exponents[j]);
  return nu;
}

std::uint32_t MultiIndex::operator[](std::uint32_t dim) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                             [](const Entry& e, std::uint32_t d) { return e.first < d; });
  return (it != entries_.end() && it->first == dim) ? it->second : 0;
}

std::uint64_t MultiIndex::order() const {
  std::uint64_t s = 0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

MultiIndex MultiIndex::with(std::uint32_t dim, std::uint32_t value) const {
  MultiIndex out = *this;
  auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), dim,
                             [](const Entry& e, std::uint32_t d) { return e.first < d; });
  if (it != out.entries_.end() && it->first == dim) {
    if (value == 0)
      out.entries_.erase(it);
    else
      it->second = value;
  } else if (value != 0) {
    out.entries_.insert(it, Entry{dim, value});
  }
  return out;
}

MultiIndex MultiIndex::incremented(std::uint32_t dim) const { return with(dim, (*this)[dim] + 1); }

MultiIndex MultiIndex::decremented(std::uint32_t dim) const {
  const auto v = (*this)[dim];
  if (v == 0) throw std::invalid_argument("cannot decrement a zero exponent");
  return with(dim, v - 1);
}

bool MultiIndex::le(const MultiIndex& other) const {
  for (const auto& [d, e] : entries_)
    if (other[d] < e) return false;
  return true;
}

std::string MultiIndex::to_string() const {
  if (entries_.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(entries_[i].first);
    s += ':';
    s += std::to_string(entries_[i].second);
  }
  return s;
}

MultiIndex MultiIndex::parse(std::string_view text) {
  std::vector<Entry> entries;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  skip_ws();
  if (pos < text.size() && text[pos] == '-') {
    ++pos;
    skip_ws();
    if (pos != text.size()) throw std::invalid_argument("trailing characters after '-'");
    return {};
  }
  while (pos < text.size()) {
    std::uint32_t dim = 0, exp = 0;
    auto r1 = std::from_chars(text.data() + pos, text.data() + text.size(), dim);
    if (r1.ec != std::errc() || r1.ptr == text.data() + text.size() || *r1.ptr != ':')
      throw std::invalid_argument("malformed multi-index token in '" + std::string(text) + "'");
    pos = std::size_t(r1.ptr - text.data()) + 1;
    auto r2 = std::from_chars(text.data() + pos, text.data() + text.size(), exp);
    if (r2.ec != std::errc() || exp == 0)
      throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
    pos = std::size_t(r2.ptr - text.data());
    entries.emplace_back(dim, exp);
    skip_ws();
  }
  if (entries.empty()) throw std::invalid_argument("empty multi-index text (use '-')");
  return MultiIndex(std::move(entries));
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& nu) { return os << nu.to_string(); }

std::size_t MultiIndexHash::operator()(const MultiIndex& nu) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& [d, e] : nu.entries()) {
    h ^= (std::uint64_t(d) << 32 | e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return std::size_t(h);
}

IndexSet::IndexSet(std::initializer_list<MultiIndex> members) : members_(members) {}

IndexSet::IndexSet(std::set<MultiIndex> members) : members_(std::move(members)) {}

bool IndexSet::insert(const MultiIndex& nu) {
  const bool added = members_.insert(nu).second;
  if (added) downward_closed_ = -1;
  return added;
}

std::uint32_t IndexSet::span() const {
  std::uint32_t s = 0;
  for (const auto& nu : members_) s = std::max(s, nu.span());
  return s;
}

bool IndexSet::is_downward_closed() const {
  if (downward_closed_ < 0) {
    bool closed = true;
    for (const auto& nu : members_) {
      for (const auto& [d, e] : nu.entries()) {
        if (!contains(nu.decremented(d))) {
          closed = false;
          break;
        }
      }
      if (!closed) break;
    }
    // Finite downward closed sets contain the zero index; the empty set is closed.
    downward_closed_ = closed ? 1 : 0;
  }
  return downward_closed_ == 1;
}

bool is_downward_closed(const IndexSet& set) { return set.is_downward_closed(); }

IndexSet restrict_F2(const IndexSet& set) {
  IndexSet out;
  for (const auto& nu : set) {
    bool keep = true;
    for (const auto& e : nu.entries())
      if (e.second == 1) keep = false;
    if (keep) out.insert(nu);
  }
  return out;
}

void write_index_set(std::ostream& os, const IndexSet& set) {
  os << "# index set: " << set.size() << " multi-indices, one per line as dim:exp pairs\n";
  for (const auto& nu : set) os << nu.to_string() << '\n';
}

IndexSet read_index_set(std::istream& is) {
  IndexSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    try {
      out.insert(MultiIndex::parse(std::string_view(line).substr(first, last - first + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

} // namespace hsg
