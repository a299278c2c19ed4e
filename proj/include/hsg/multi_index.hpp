#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsg {

/// Finitely supported sequence of nonnegative integer exponents.
///
/// Stored sparsely as (dimension, exponent) pairs with strictly increasing
/// dimension and no zero exponents, so equality and ordering are structural.
class MultiIndex {
public:
  using Entry = std::pair<std::uint32_t, std::uint32_t>;

  MultiIndex() = default;
  /// Accepts entries in any order; zero exponents are dropped. Duplicate
  /// dimensions are rejected with std::invalid_argument.
  MultiIndex(std::initializer_list<Entry> entries);
  explicit MultiIndex(std::vector<Entry> entries);

  static MultiIndex unit(std::uint32_t dim, std::uint32_t exponent = 1);
  /// Builds from a dense exponent vector (entry j is the exponent of dimension j).
  static MultiIndex from_dense(const std::vector<std::uint32_t>& exponents);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  /// Number of nonzero exponents.
  std::size_t support_size() const { return entries_.size(); }
  /// Exponent of dimension `dim` (0 if inactive).
  std::uint32_t operator[](std::uint32_t dim) const;
  /// |nu| = sum of exponents.
  std::uint64_t order() const;
  /// One past the largest active dimension (0 for the empty index).
  std::uint32_t span() const { return entries_.empty() ? 0 : entries_.back().first + 1; }

  /// Returns nu + e_dim.
  MultiIndex incremented(std::uint32_t dim) const;
  /// Returns nu - e_dim; requires nu[dim] > 0.
  MultiIndex decremented(std::uint32_t dim) const;
  /// Returns nu with exponent of `dim` replaced by `value`.
  MultiIndex with(std::uint32_t dim, std::uint32_t value) const;

  /// Componentwise mu <= nu.
  bool le(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  /// Rendering used by every text format: "dim:exp dim:exp", "-" when empty.
  std::string to_string() const;
  static MultiIndex parse(std::string_view text);

private:
  void canonicalize();
  std::vector<Entry> entries_;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& nu);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& nu) const noexcept;
};

/// Finite set of multi-indices iterated in canonical order.
class IndexSet {
public:
  using const_iterator = std::set<MultiIndex>::const_iterator;

  IndexSet() = default;
  IndexSet(std::initializer_list<MultiIndex> members);
  explicit IndexSet(std::set<MultiIndex> members);

  bool insert(const MultiIndex& nu);
  bool contains(const MultiIndex& nu) const { return members_.count(nu) != 0; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const_iterator begin() const { return members_.begin(); }
  const_iterator end() const { return members_.end(); }
  const std::set<MultiIndex>& members() const { return members_; }

  /// One past the largest active dimension over all members.
  std::uint32_t span() const;
  /// Cached after the first query; invalidated by insert().
  bool is_downward_closed() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) { return a.members_ == b.members_; }

private:
  std::set<MultiIndex> members_;
  mutable int downward_closed_ = -1;
};

bool is_downward_closed(const IndexSet& set);

/// Members with no exponent equal to 1.
IndexSet restrict_F2(const IndexSet& set);

/// Writes one multi-index per line; '#' comment header.
void write_index_set(std::ostream& os, const IndexSet& set);
/// Reads the format of write_index_set; ignores blank and '#' lines.
IndexSet read_index_set(std::istream& is);

} // namespace hsg
