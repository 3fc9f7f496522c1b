#include "roughclus/roughset.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "roughclus/errors.hpp"

namespace roughclus {

DecisionTable::DecisionTable(std::vector<std::string> attribute_names, std::string decision_name)
    : names_(std::move(attribute_names)), decision_name_(std::move(decision_name)), value_tokens_(names_.size()) {
  if (names_.empty()) throw DataError("decision table needs at least one attribute");
}

namespace {

int intern(std::vector<std::string>& tokens, const std::string& token) {
  const auto it = std::find(tokens.begin(), tokens.end(), token);
  if (it != tokens.end()) return static_cast<int>(it - tokens.begin());
  tokens.push_back(token);
  return static_cast<int>(tokens.size() - 1);
}

}  // namespace

void DecisionTable::add_row(std::span<const std::string> values, const std::string& decision) {
  if (values.size() != names_.size())
    throw DataError("row has " + std::to_string(values.size()) + " values, expected " + std::to_string(names_.size()));
  std::vector<int> codes(values.size());
  for (std::size_t a = 0; a < values.size(); ++a) codes[a] = intern(value_tokens_[a], values[a]);
  rows_.push_back(std::move(codes));
  decisions_.push_back(intern(decision_tokens_, decision));
}

RowSet DecisionTable::all_rows() const {
  RowSet all(row_count());
  all.set();
  return all;
}

DecisionTable parse_decision_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  auto split = [](const std::string& s, bool comma) {
    std::vector<std::string> fields;
    if (comma) {
      std::string field;
      std::istringstream fs(s);
      while (std::getline(fs, field, ',')) {
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
      }
      if (!s.empty() && s.back() == ',') fields.emplace_back();
    } else {
      std::istringstream fs(s);
      std::string field;
      while (fs >> field) fields.push_back(field);
    }
    return fields;
  };

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw DataError("decision table is empty");
  const bool comma = line.find(',') != std::string::npos;
  std::vector<std::string> header = split(line, comma);
  if (header.size() < 2 || header.back() != "class")
    throw DataError("decision table header must list attributes followed by `class`");
  header.pop_back();
  DecisionTable table(header);
  while (next_line()) {
    std::vector<std::string> fields = split(line, comma);
    if (fields.size() != header.size() + 1)
      throw DataError("decision table line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size() + 1) + " fields");
    for (const auto& f : fields) {
      if (f.empty()) throw DataError("decision table line " + std::to_string(line_no) + ": empty field");
    }
    const std::string decision = fields.back();
    fields.pop_back();
    table.add_row(fields, decision);
  }
  return table;
}

std::vector<Block> compute_blocks(const DecisionTable& table) {
  std::vector<Block> blocks;
  for (std::size_t a = 0; a < table.attribute_count(); ++a) {
    const std::size_t first = blocks.size();
    for (std::size_t v = 0; v < table.value_count(a); ++v)
      blocks.push_back({{a, static_cast<int>(v)}, RowSet(table.row_count())});
    for (std::size_t r = 0; r < table.row_count(); ++r)
      blocks[first + static_cast<std::size_t>(table.value(r, a))].members.set(r);
  }
  return blocks;
}

std::vector<Concept> compute_concepts(const DecisionTable& table) {
  std::vector<Concept> concepts;
  for (std::size_t d = 0; d < table.decision_count(); ++d)
    concepts.push_back({static_cast<int>(d), RowSet(table.row_count())});
  for (std::size_t r = 0; r < table.row_count(); ++r)
    concepts[static_cast<std::size_t>(table.decision(r))].members.set(r);
  return concepts;
}

Partition indiscernibility_classes(const DecisionTable& table, std::span<const std::size_t> attributes) {
  if (attributes.empty()) throw DataError("indiscernibility needs a non-empty attribute subset");
  for (std::size_t a : attributes) {
    if (a >= table.attribute_count()) throw DataError("attribute index out of range");
  }
  std::map<std::vector<int>, std::size_t> class_of;
  Partition classes;
  std::vector<int> key(attributes.size());
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t k = 0; k < attributes.size(); ++k) key[k] = table.value(r, attributes[k]);
    auto [it, inserted] = class_of.emplace(key, classes.size());
    if (inserted) classes.emplace_back(table.row_count());
    classes[it->second].set(r);
  }
  return classes;
}

Partition indiscernibility_classes(const DecisionTable& table) {
  std::vector<std::size_t> all(table.attribute_count());
  for (std::size_t a = 0; a < all.size(); ++a) all[a] = a;
  return indiscernibility_classes(table, all);
}

RowSet lower_approx(const RowSet& x, const Partition& partition) {
  RowSet out(x.size());
  for (const RowSet& cls : partition) {
    if (cls.is_subset_of(x)) out |= cls;
  }
  return out;
}

RowSet upper_approx(const RowSet& x, const Partition& partition) {
  RowSet out(x.size());
  for (const RowSet& cls : partition) {
    if (cls.intersects(x)) out |= cls;
  }
  return out;
}

RowSet complex_block(const DecisionTable& table, std::span<const AVPair> complex) {
  RowSet out = table.all_rows();
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (const AVPair& t : complex) {
      if (table.value(r, t.attribute) != t.value) {
        out.reset(r);
        break;
      }
    }
  }
  return out;
}

namespace {

RowSet block_of(const std::vector<Block>& blocks, std::span<const AVPair> complex, std::size_t rows) {
  RowSet out(rows);
  out.set();
  for (const AVPair& t : complex) {
    for (const Block& b : blocks) {
      if (b.pair == t) {
        out &= b.members;
        break;
      }
    }
  }
  return out;
}

}  // namespace

LocalCovering lem2_local_covering(const RowSet& target, const DecisionTable& table) {
  if (target.size() != table.row_count()) throw DataError("target set does not match the table");
  if (target.none()) throw DataError("empty target");

  const std::vector<Block> blocks = compute_blocks(table);
  const std::size_t rows = table.row_count();
  LocalCovering covering{{}, target};

  RowSet goal = target;
  RowSet covered(rows);
  while (goal.any()) {
    std::vector<AVPair> complex;
    std::vector<bool> used(blocks.size(), false);
    RowSet complex_rows(rows);
    complex_rows.set();
    RowSet g = goal;
    while (complex.empty() || !complex_rows.is_subset_of(target)) {
      // Best relevant pair: largest |[t] & G|, then smallest |[t]|, then first.
      std::size_t best = blocks.size();
      std::size_t best_hits = 0;
      std::size_t best_size = 0;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (used[b]) continue;
        const std::size_t hits = (blocks[b].members & g).count();
        if (hits == 0) continue;
        const std::size_t size = blocks[b].members.count();
        if (best == blocks.size() || hits > best_hits || (hits == best_hits && size < best_size)) {
          best = b;
          best_hits = hits;
          best_size = size;
        }
      }
      if (best == blocks.size()) throw DataError("uncoverable target");
      used[best] = true;
      complex.push_back(blocks[best].pair);
      complex_rows &= blocks[best].members;
      g &= blocks[best].members;
    }

    // Drop redundant conditions, earliest first; a complex keeps at least one.
    for (std::size_t k = 0; k < complex.size() && complex.size() > 1;) {
      std::vector<AVPair> reduced = complex;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
      if (block_of(blocks, reduced, rows).is_subset_of(target)) {
        complex = std::move(reduced);
      } else {
        ++k;
      }
    }

    covered |= block_of(blocks, complex, rows);
    covering.complexes.push_back(std::move(complex));
    goal = target - covered;
  }

  // Drop complexes the rest already cover.
  for (std::size_t k = 0; k < covering.complexes.size() && covering.complexes.size() > 1;) {
    RowSet rest(rows);
    for (std::size_t j = 0; j < covering.complexes.size(); ++j) {
      if (j != k) rest |= block_of(blocks, covering.complexes[j], rows);
    }
    if (rest == target) {
      covering.complexes.erase(covering.complexes.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      ++k;
    }
  }
  return covering;
}

bool is_consistent(const DecisionTable& table) {
  const Partition classes = indiscernibility_classes(table);
  for (const Concept& c : compute_concepts(table)) {
    if (lower_approx(c.members, classes) != c.members) return false;
  }
  return true;
}

namespace {

void emit_rules(const DecisionTable& table, const Concept& concept_, const LocalCovering& covering,
                Certainty certainty, std::vector<Rule>& out) {
  for (const auto& complex : covering.complexes) {
    Rule rule;
    for (const AVPair& t : complex)
      rule.conditions.push_back({table.attribute_names()[t.attribute], table.value_token(t.attribute, t.value)});
    rule.decision_attribute = table.decision_name();
    rule.decision = table.decision_token(concept_.decision_value);
    rule.certainty = certainty;
    rule.support = (complex_block(table, complex) & concept_.members).count();
    rule.strength = rule.support;
    out.push_back(std::move(rule));
  }
}

}  // namespace

std::vector<Rule> induce_rules(const DecisionTable& table) {
  std::vector<Rule> rules;
  if (table.row_count() == 0) return rules;
  const Partition classes = indiscernibility_classes(table);
  for (const Concept& c : compute_concepts(table)) {
    const RowSet lower = lower_approx(c.members, classes);
    if (lower == c.members) {
      emit_rules(table, c, lem2_local_covering(c.members, table), Certainty::certain, rules);
      continue;
    }
    if (lower.any()) emit_rules(table, c, lem2_local_covering(lower, table), Certainty::certain, rules);
    emit_rules(table, c, lem2_local_covering(upper_approx(c.members, classes), table), Certainty::possible, rules);
  }
  return rules;
}

}  // namespace roughclus
