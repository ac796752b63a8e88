// Copyright 2026 The boca-cpp Authors
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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "boca/error.hpp"

namespace boca {

/// A subset of the m items as a dense 0/1 indicator vector.
class Bundle {
 public:
  Bundle() = default;
  explicit Bundle(std::size_t m) : bits_(m, 0) {}
  Bundle(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) push_checked(b);
  }
  explicit Bundle(std::span<const int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) push_checked(b);
  }

  static Bundle empty(std::size_t m) { return Bundle(m); }
  static Bundle full(std::size_t m) {
    Bundle b(m);
    for (auto& x : b.bits_) x = 1;
    return b;
  }
  /// Bit j of `mask` becomes item j. Requires m <= 64.
  static Bundle from_mask(std::uint64_t mask, std::size_t m) {
    if (m > 64) throw InvalidInput("Bundle::from_mask supports at most 64 items");
    Bundle b(m);
    for (std::size_t j = 0; j < m; ++j) b.bits_[j] = static_cast<std::uint8_t>((mask >> j) & 1U);
    return b;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t j) const { return bits_[j] != 0; }
  void set(std::size_t j, bool v) { bits_[j] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : bits_) c += x;
    return c;
  }
  bool is_empty() const { return count() == 0; }
  bool is_full() const { return count() == bits_.size(); }

  std::uint64_t to_mask() const {
    if (bits_.size() > 64) throw InvalidInput("Bundle::to_mask supports at most 64 items");
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < bits_.size(); ++j)
      if (bits_[j]) mask |= (std::uint64_t{1} << j);
    return mask;
  }

  /// this ⊆ other
  bool subset_of(const Bundle& other) const {
    check_same_size(other);
    for (std::size_t j = 0; j < bits_.size(); ++j)
      if (bits_[j] && !other.bits_[j]) return false;
    return true;
  }

  bool disjoint(const Bundle& other) const {
    check_same_size(other);
    for (std::size_t j = 0; j < bits_.size(); ++j)
      if (bits_[j] && other.bits_[j]) return false;
    return true;
  }

  Bundle operator|(const Bundle& other) const {
    check_same_size(other);
    Bundle r = *this;
    for (std::size_t j = 0; j < bits_.size(); ++j) r.bits_[j] |= other.bits_[j];
    return r;
  }

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::vector<double> as_doubles() const { return {bits_.begin(), bits_.end()}; }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto x : bits_) s.push_back(x ? '1' : '0');
    return s;
  }

  friend bool operator==(const Bundle&, const Bundle&) = default;
  friend auto operator<=>(const Bundle&, const Bundle&) = default;

 private:
  void push_checked(int b) {
    if (b != 0 && b != 1) throw InvalidInput("bundle entries must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
  void check_same_size(const Bundle& other) const {
    if (other.bits_.size() != bits_.size()) throw InvalidInput("bundle length mismatch");
  }

  std::vector<std::uint8_t> bits_;
};

struct BundleHash {
  std::size_t operator()(const Bundle& b) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : b.bits()) {
      h ^= x;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (b.size() * 0x9E3779B97F4A7C15ULL));
  }
};

/// One bundle per bidder.
using Allocation = std::vector<Bundle>;

inline Allocation empty_allocation(std::size_t n, std::size_t m) {
  return Allocation(n, Bundle::empty(m));
}

/// Concatenation of the bidders' indicator vectors; the key for lexicographic tie-breaking.
inline std::vector<std::uint8_t> flatten(const Allocation& a) {
  std::vector<std::uint8_t> out;
  for (const auto& b : a) out.insert(out.end(), b.bits().begin(), b.bits().end());
  return out;
}

struct Report {
  Bundle bundle;
  double value = 0.0;
};

/// The bundle-value pairs one bidder reported, in elicitation order.
class BidderReports {
 public:
  BidderReports() = default;
  explicit BidderReports(std::size_t m) : m_(m) {}

  std::size_t num_items() const { return m_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Report>& entries() const { return entries_; }

  /// Appends a report. Duplicates, negative values, and a non-zero empty bundle are rejected.
  void add(const Bundle& bundle, double value) {
    if (bundle.size() != m_) throw InvalidInput("report bundle length mismatch");
    if (!(value >= 0.0)) throw InvalidReport("reported values must be non-negative");
    if (bundle.is_empty() && value != 0.0) throw InvalidReport("the empty bundle must be reported at 0");
    if (index_.contains(bundle)) throw InvalidReport("bundle already reported: " + bundle.to_string());
    index_.emplace(bundle, entries_.size());
    entries_.push_back({bundle, value});
  }

  bool contains(const Bundle& bundle) const { return index_.contains(bundle); }

  std::optional<double> value_of(const Bundle& bundle) const {
    auto it = index_.find(bundle);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].value;
  }

 private:
  std::size_t m_ = 0;
  std::vector<Report> entries_;
  std::unordered_map<Bundle, std::size_t, BundleHash> index_;
};

/// Reports of all n bidders.
class ReportSet {
 public:
  ReportSet() = default;
  ReportSet(std::size_t n, std::size_t m) : m_(m), bidders_(n, BidderReports(m)) {}

  std::size_t num_bidders() const { return bidders_.size(); }
  std::size_t num_items() const { return m_; }
  BidderReports& operator[](std::size_t i) { return bidders_.at(i); }
  const BidderReports& operator[](std::size_t i) const { return bidders_.at(i); }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& b : bidders_) t += b.size();
    return t;
  }

 private:
  std::size_t m_ = 0;
  std::vector<BidderReports> bidders_;
};

}  // namespace boca
