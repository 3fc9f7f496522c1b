#include <sstream>

#include "roughclus/classify.hpp"
#include "roughclus/errors.hpp"

namespace roughclus {

namespace {

const char* certainty_name(Certainty c) { return c == Certainty::certain ? "certain" : "possible"; }

}  // namespace

std::string format_rule(const Rule& rule) {
  std::string out = "IF ";
  for (std::size_t k = 0; k < rule.conditions.size(); ++k) {
    if (k) out += " AND ";
    out += rule.conditions[k].attribute + "=" + rule.conditions[k].value;
  }
  out += " THEN " + rule.decision_attribute + "=" + rule.decision + " [" + certainty_name(rule.certainty) +
         ", support=" + std::to_string(rule.support) + "]";
  return out;
}

std::string encode_rules_text(std::span<const Rule> rules) {
  std::string out;
  for (const Rule& r : rules) out += format_rule(r) + "\n";
  return out;
}

std::string encode_rules_records(std::span<const Rule> rules, const Discretizer& disc) {
  std::string out = "format=roughclus-rules version=1\n";
  out += "discretizer bins=" + std::to_string(disc.bins) + "\n";
  for (const Rule& r : rules) {
    out += "rule decision=" + r.decision_attribute + ":" + r.decision + " certainty=" + certainty_name(r.certainty) +
           " support=" + std::to_string(r.support) + " strength=" + std::to_string(r.strength) + " conditions=";
    for (std::size_t k = 0; k < r.conditions.size(); ++k) {
      if (k) out += ',';
      out += r.conditions[k].attribute + ":" + r.conditions[k].value;
    }
    out += '\n';
  }
  return out;
}

RuleBase parse_rules_records(std::string_view text) {
  RuleBase base;
  bool saw_format = false;
  bool saw_discretizer = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& why) {
    throw DataError("rules line " + std::to_string(line_no) + ": " + why);
  };
  auto parse_count = [&](const std::string& v) -> std::size_t {
    try {
      std::size_t used = 0;
      const unsigned long long n = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      fail("`" + v + "` is not a count");
    }
    return 0;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head == "format=roughclus-rules") {
      std::string version;
      if (!(fields >> version) || version != "version=1") fail("unsupported rules format version");
      saw_format = true;
      continue;
    }
    if (!saw_format) fail("missing `format=roughclus-rules` header");
    std::string field;
    if (head == "discretizer") {
      while (fields >> field) {
        if (field.rfind("bins=", 0) == 0) {
          base.disc.bins = static_cast<int>(parse_count(field.substr(5)));
        } else {
          fail("unknown discretizer field `" + field + "`");
        }
      }
      saw_discretizer = true;
      continue;
    }
    if (head != "rule") fail("unknown record `" + head + "`");
    Rule rule;
    bool has_decision = false;
    bool has_conditions = false;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) fail("field `" + field + "` is not key=value");
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "decision") {
        const auto colon = value.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == value.size()) fail("malformed decision");
        rule.decision_attribute = value.substr(0, colon);
        rule.decision = value.substr(colon + 1);
        has_decision = true;
      } else if (key == "certainty") {
        if (value == "certain") {
          rule.certainty = Certainty::certain;
        } else if (value == "possible") {
          rule.certainty = Certainty::possible;
        } else {
          fail("certainty must be certain or possible");
        }
      } else if (key == "support") {
        rule.support = parse_count(value);
      } else if (key == "strength") {
        rule.strength = parse_count(value);
      } else if (key == "conditions") {
        std::istringstream conds(value);
        std::string cond;
        while (std::getline(conds, cond, ',')) {
          const auto colon = cond.find(':');
          if (colon == std::string::npos || colon == 0 || colon + 1 == cond.size()) fail("malformed condition");
          rule.conditions.push_back({cond.substr(0, colon), cond.substr(colon + 1)});
        }
        has_conditions = !rule.conditions.empty();
      } else {
        fail("unknown rule field `" + key + "`");
      }
    }
    if (!has_decision || !has_conditions) fail("rule needs a decision and at least one condition");
    base.rules.push_back(std::move(rule));
  }
  if (!saw_format) throw DataError("rules file is missing the format header");
  if (!saw_discretizer) throw DataError("rules file is missing the discretizer record");
  base.disc.validate();
  return base;
}

}  // namespace roughclus
