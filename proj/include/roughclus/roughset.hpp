#pragma once

#include <boost/dynamic_bitset.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roughclus {

/// Set of decision-table row ids.
using RowSet = boost::dynamic_bitset<std::uint64_t>;

/// Discrete decision table. Attribute values and decisions are stored as
/// small integer codes assigned in order of first appearance; the original
/// tokens are kept for naming rules.
class DecisionTable {
 public:
  explicit DecisionTable(std::vector<std::string> attribute_names, std::string decision_name = "class");

  /// Appends one example given as tokens; codes are assigned on first sight.
  void add_row(std::span<const std::string> values, const std::string& decision);

  std::size_t row_count() const noexcept { return decisions_.size(); }
  std::size_t attribute_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& attribute_names() const noexcept { return names_; }
  const std::string& decision_name() const noexcept { return decision_name_; }

  int value(std::size_t row, std::size_t attribute) const { return rows_[row][attribute]; }
  int decision(std::size_t row) const { return decisions_[row]; }
  const std::vector<int>& row(std::size_t r) const { return rows_[r]; }

  std::size_t value_count(std::size_t attribute) const { return value_tokens_[attribute].size(); }
  const std::string& value_token(std::size_t attribute, int code) const {
    return value_tokens_[attribute][static_cast<std::size_t>(code)];
  }
  std::size_t decision_count() const noexcept { return decision_tokens_.size(); }
  const std::string& decision_token(int code) const { return decision_tokens_[static_cast<std::size_t>(code)]; }

  RowSet all_rows() const;

 private:
  std::vector<std::string> names_;
  std::string decision_name_;
  std::vector<std::vector<int>> rows_;
  std::vector<int> decisions_;
  std::vector<std::vector<std::string>> value_tokens_;
  std::vector<std::string> decision_tokens_;
};

/// Parses the delimited text form: a header of attribute names ending in
/// `class`, then one example per line. Fields are comma separated when the
/// header contains a comma, otherwise whitespace separated.
DecisionTable parse_decision_table(std::string_view text);

struct AVPair {
  std::size_t attribute = 0;
  int value = 0;

  auto operator<=>(const AVPair&) const = default;
};

struct Block {
  AVPair pair;
  RowSet members;
};

/// A block for every (attribute, value) occurring in the table, ordered by
/// attribute then value code.
std::vector<Block> compute_blocks(const DecisionTable& table);

struct Concept {
  int decision_value = 0;
  RowSet members;
};

/// One concept per decision value, in code order.
std::vector<Concept> compute_concepts(const DecisionTable& table);

using Partition = std::vector<RowSet>;

/// Rows grouped by equal projection onto the attribute subset, classes
/// ordered by their smallest row.
Partition indiscernibility_classes(const DecisionTable& table, std::span<const std::size_t> attributes);
Partition indiscernibility_classes(const DecisionTable& table);

RowSet lower_approx(const RowSet& x, const Partition& partition);
RowSet upper_approx(const RowSet& x, const Partition& partition);
inline RowSet boundary_region(const RowSet& x, const Partition& partition) {
  return upper_approx(x, partition) - lower_approx(x, partition);
}

/// Rows matching every pair of the complex; the empty complex matches all rows.
RowSet complex_block(const DecisionTable& table, std::span<const AVPair> complex);

struct LocalCovering {
  std::vector<std::vector<AVPair>> complexes;
  RowSet target;
};

LocalCovering lem2_local_covering(const RowSet& target, const DecisionTable& table);

enum class Certainty { certain, possible };

struct Condition {
  std::string attribute;
  std::string value;

  bool operator==(const Condition&) const = default;
};

struct Rule {
  std::vector<Condition> conditions;
  std::string decision_attribute = "class";
  std::string decision;
  Certainty certainty = Certainty::certain;
  std::size_t support = 0;
  std::size_t strength = 0;

  bool operator==(const Rule&) const = default;
};

/// True when every concept equals its lower approximation.
bool is_consistent(const DecisionTable& table);

/// Certain rules from lower approximations (or concepts, when consistent),
/// possible rules from upper approximations of inconsistent concepts.
std::vector<Rule> induce_rules(const DecisionTable& table);

}  // namespace roughclus
