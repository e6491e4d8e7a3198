#include "reach/action_set_io.h"

#include <charconv>
#include <cstdint>
#include <sstream>

namespace reach {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Splits on `sep` at nesting depth zero of () and [].
std::vector<std::string_view> SplitTopLevel(std::string_view s, char sep,
                                            int line) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') {
      if (--depth < 0) throw ParseError("unbalanced brackets", line);
    }
    if (c == sep && depth == 0) {
      out.push_back(Trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced brackets", line);
  out.push_back(Trim(s.substr(start)));
  return out;
}

Value ParseInt(std::string_view s, int line, const std::string& field) {
  s = Trim(s);
  Value v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line,
                     field);
  }
  return v;
}

// "[a, b, c]" -> {"a","b","c"}; "[]" -> {}.
std::vector<std::string_view> ParseList(std::string_view s, int line,
                                        const std::string& field) {
  s = Trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ParseError("expected a [list]", line, field);
  }
  auto inner = Trim(s.substr(1, s.size() - 2));
  if (inner.empty()) return {};
  return SplitTopLevel(inner, ',', line);
}

struct Record {
  std::string kind;
  std::vector<std::pair<std::string, std::string_view>> args;
  int line = 0;

  std::optional<std::string_view> Get(std::string_view key) const {
    for (const auto& [k, v] : args) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
  std::string_view Require(std::string_view key) const {
    auto v = Get(key);
    if (!v) {
      throw ParseError(kind + " is missing argument '" + std::string(key) + "'",
                       line, std::string(key));
    }
    return *v;
  }
  void AllowOnly(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : args) {
      bool ok = false;
      for (auto key : keys) ok = ok || k == key;
      if (!ok) {
        throw ParseError("unknown argument '" + k + "' for " + kind, line, k);
      }
    }
  }
};

Record ParseRecord(std::string_view text, int line) {
  text = Trim(text);
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ParseError("expected kind(arg=value, ...)", line);
  }
  Record r;
  r.line = line;
  r.kind = Lower(Trim(text.substr(0, open)));
  auto inner = Trim(text.substr(open + 1, text.size() - open - 2));
  if (inner.empty()) return r;
  for (auto arg : SplitTopLevel(inner, ',', line)) {
    auto eq = arg.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("argument '" + std::string(arg) + "' lacks '='", line);
    }
    std::string key = Lower(Trim(arg.substr(0, eq)));
    for (const auto& [k, v] : r.args) {
      if (k == key) throw ParseError("repeated argument '" + key + "'", line, key);
    }
    r.args.emplace_back(std::move(key), Trim(arg.substr(eq + 1)));
  }
  return r;
}

class Resolver {
 public:
  explicit Resolver(const std::vector<FeatureSpec>& features)
      : features_(features) {}

  int Index(std::string_view name, int line) const {
    name = Trim(name);
    for (std::size_t j = 0; j < features_.size(); ++j) {
      if (features_[j].name == name) return static_cast<int>(j);
    }
    throw ValidationError("line " + std::to_string(line) +
                          ": unknown feature '" + std::string(name) + "'");
  }

  std::vector<int> Indices(std::string_view list, int line,
                           const std::string& field) const {
    std::vector<int> out;
    for (auto item : ParseList(list, line, field)) out.push_back(Index(item, line));
    return out;
  }

 private:
  const std::vector<FeatureSpec>& features_;
};

Constraint BuildConstraint(const Record& r, const Resolver& names) {
  const int line = r.line;
  if (r.kind == "one_hot") {
    r.AllowOnly({"features", "min", "max"});
    OneHotEncoding k;
    k.features = names.Indices(r.Require("features"), line, "features");
    if (auto v = r.Get("min")) k.min_on = static_cast<int>(ParseInt(*v, line, "min"));
    if (auto v = r.Get("max")) k.max_on = static_cast<int>(ParseInt(*v, line, "max"));
    return k;
  }
  if (r.kind == "thermometer") {
    r.AllowOnly({"features", "direction"});
    ThermometerEncoding k;
    k.features = names.Indices(r.Require("features"), line, "features");
    auto dir = Lower(Trim(r.Require("direction")));
    if (dir == "increase") {
      k.direction = ThermometerDirection::kIncrease;
    } else if (dir == "decrease") {
      k.direction = ThermometerDirection::kDecrease;
    } else {
      throw ParseError("direction must be increase or decrease", line,
                       "direction");
    }
    return k;
  }
  if (r.kind == "linkage") {
    r.AllowOnly({"source", "targets"});
    DirectionalLinkage k;
    k.source = names.Index(r.Require("source"), line);
    for (auto item : ParseList(r.Require("targets"), line, "targets")) {
      LinkTarget t;
      auto colon = item.find(':');
      t.feature = names.Index(item.substr(0, colon), line);
      if (colon != std::string_view::npos) {
        try {
          t.scale = Rational::Parse(item.substr(colon + 1));
        } catch (const ParseError& e) {
          throw ParseError(e.what(), line, "targets");
        }
      }
      k.targets.push_back(t);
    }
    return k;
  }
  if (r.kind == "if_then") {
    r.AllowOnly({"if", "geq", "then", "value", "on"});
    IfThen k;
    k.antecedent = names.Index(r.Require("if"), line);
    k.threshold = ParseInt(r.Require("geq"), line, "geq");
    k.consequent = names.Index(r.Require("then"), line);
    k.forced = ParseInt(r.Require("value"), line, "value");
    if (auto on = r.Get("on")) {
      auto basis = Lower(Trim(*on));
      if (basis == "value") {
        k.basis = ImplicationBasis::kValue;
      } else if (basis == "action") {
        k.basis = ImplicationBasis::kAction;
      } else {
        throw ParseError("on must be value or action", line, "on");
      }
    }
    return k;
  }
  if (r.kind == "reachability") {
    r.AllowOnly({"features", "values", "edges"});
    ReachabilityMatrix k;
    k.features = names.Indices(r.Require("features"), line, "features");
    for (auto item : ParseList(r.Require("values"), line, "values")) {
      item = Trim(item);
      if (item.size() < 2 || item.front() != '(' || item.back() != ')') {
        throw ParseError("values must be (tuples)", line, "values");
      }
      std::vector<Value> tuple;
      for (auto cell : SplitTopLevel(item.substr(1, item.size() - 2), ',', line)) {
        tuple.push_back(ParseInt(cell, line, "values"));
      }
      k.values.push_back(std::move(tuple));
    }
    for (auto row : ParseList(r.Require("edges"), line, "edges")) {
      std::vector<bool> bits;
      for (char c : Trim(row)) {
        if (c != '0' && c != '1') {
          throw ParseError("edge rows are strings of 0/1", line, "edges");
        }
        bits.push_back(c == '1');
      }
      k.edges.push_back(std::move(bits));
    }
    return k;
  }
  throw ParseError("unknown constraint kind '" + r.kind + "'", line);
}

FeatureSpec ParseFeatureRow(std::string_view row, int line) {
  auto cells = SplitTopLevel(row, ',', line);
  if (cells.size() == 5) cells.emplace_back();  // blank sign without comma
  if (cells.size() != 6) {
    throw ParseError("feature rows have 6 fields: name,type,lb,ub,actionable,sign",
                     line);
  }
  FeatureSpec f;
  f.name = std::string(cells[0]);
  if (f.name.empty()) throw ParseError("empty feature name", line, "name");
  auto type = Lower(cells[1]);
  if (type == "binary" || type == "bool") {
    f.type = ValueType::kBinary;
  } else if (type == "integer" || type == "int") {
    f.type = ValueType::kInteger;
  } else {
    throw ParseError("type must be binary or integer, got '" +
                         std::string(cells[1]) + "'",
                     line, "type");
  }
  f.lower_bound = ParseInt(cells[2], line, "lb");
  f.upper_bound = ParseInt(cells[3], line, "ub");
  auto act = Lower(cells[4]);
  if (act == "yes" || act == "true" || act == "1") {
    f.actionable = true;
  } else if (act == "no" || act == "false" || act == "0") {
    f.actionable = false;
  } else {
    throw ParseError("actionable must be yes or no", line, "actionable");
  }
  auto sign = Lower(cells[5]);
  if (sign.empty() || sign == "free") {
    f.sign = Sign::kFree;
  } else if (sign == "+") {
    f.sign = Sign::kNonNegative;
  } else if (sign == "-") {
    f.sign = Sign::kNonPositive;
  } else {
    throw ParseError("sign must be +, - or free", line, "sign");
  }
  return f;
}

}  // namespace

ActionSet ParseActionSet(std::string_view text) {
  enum class Section { kNone, kFeatures, kConstraints };
  Section section = Section::kNone;
  std::vector<FeatureSpec> features;
  std::vector<std::pair<std::string, int>> records;  // text, first line

  std::string pending;
  int pending_line = 0;
  int depth = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view view(raw);
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;

    if (depth == 0 && view.front() == '[' && view.back() == ']' &&
        view.find('(') == std::string_view::npos) {
      auto name = Lower(Trim(view.substr(1, view.size() - 2)));
      if (name == "features") {
        section = Section::kFeatures;
      } else if (name == "constraints") {
        section = Section::kConstraints;
      } else {
        throw ParseError("unknown section [" + name + "]", line);
      }
      continue;
    }

    switch (section) {
      case Section::kNone:
        throw ParseError("content before [features] section", line);
      case Section::kFeatures: {
        if (Lower(view) == "name,type,lb,ub,actionable,sign") continue;
        features.push_back(ParseFeatureRow(view, line));
        break;
      }
      case Section::kConstraints: {
        if (depth == 0) {
          pending.clear();
          pending_line = line;
        } else {
          pending.push_back(' ');
        }
        pending.append(view);
        for (char c : view) {
          if (c == '(' || c == '[') ++depth;
          if (c == ')' || c == ']') --depth;
        }
        if (depth < 0) throw ParseError("unbalanced brackets", line);
        if (depth == 0) records.emplace_back(pending, pending_line);
        break;
      }
    }
  }
  if (depth != 0) throw ParseError("unterminated constraint record", pending_line);
  if (features.empty()) throw ParseError("no features declared", line);

  Resolver resolver(features);
  std::vector<Constraint> constraints;
  for (const auto& [rec_text, rec_line] : records) {
    constraints.push_back(
        BuildConstraint(ParseRecord(rec_text, rec_line), resolver));
  }
  return ActionSet(std::move(features), std::move(constraints));
}

ActionSet LoadActionSet(const std::filesystem::path& path) {
  return ParseActionSet(ReadFile(path));
}

std::string SerializeActionSet(const ActionSet& spec) {
  std::ostringstream out;
  const auto& fs = spec.features();
  auto name = [&](int j) -> const std::string& { return fs[j].name; };
  auto name_list = [&](const std::vector<int>& idx) {
    std::string s = "[";
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i > 0) s += ", ";
      s += name(idx[i]);
    }
    return s + "]";
  };

  out << "[features]\n";
  out << "name,type,lb,ub,actionable,sign\n";
  for (const auto& f : fs) {
    out << f.name << ','
        << (f.type == ValueType::kBinary ? "binary" : "integer") << ','
        << f.lower_bound << ',' << f.upper_bound << ','
        << (f.actionable ? "yes" : "no") << ',';
    if (f.sign == Sign::kNonNegative) out << '+';
    if (f.sign == Sign::kNonPositive) out << '-';
    out << '\n';
  }
  out << "\n[constraints]\n";
  for (const auto& c : spec.constraints()) {
    std::visit(
        Overloaded{
            [&](const OneHotEncoding& k) {
              out << "one_hot(features=" << name_list(k.features)
                  << ", min=" << k.min_on << ", max=" << k.max_on << ")";
            },
            [&](const ThermometerEncoding& k) {
              out << "thermometer(features=" << name_list(k.features)
                  << ", direction="
                  << (k.direction == ThermometerDirection::kIncrease
                          ? "increase"
                          : "decrease")
                  << ")";
            },
            [&](const DirectionalLinkage& k) {
              out << "linkage(source=" << name(k.source) << ", targets=[";
              for (std::size_t i = 0; i < k.targets.size(); ++i) {
                if (i > 0) out << ", ";
                out << name(k.targets[i].feature) << ':'
                    << k.targets[i].scale.ToString();
              }
              out << "])";
            },
            [&](const IfThen& k) {
              out << "if_then(if=" << name(k.antecedent)
                  << ", geq=" << k.threshold << ", then=" << name(k.consequent)
                  << ", value=" << k.forced << ", on="
                  << (k.basis == ImplicationBasis::kValue ? "value" : "action")
                  << ")";
            },
            [&](const ReachabilityMatrix& k) {
              out << "reachability(features=" << name_list(k.features)
                  << ", values=[";
              for (std::size_t i = 0; i < k.values.size(); ++i) {
                if (i > 0) out << ", ";
                out << '(' << FormatPoint(k.values[i]) << ')';
              }
              out << "], edges=[";
              for (std::size_t i = 0; i < k.edges.size(); ++i) {
                if (i > 0) out << ", ";
                for (bool b : k.edges[i]) out << (b ? '1' : '0');
              }
              out << "])";
            },
        },
        c);
    out << '\n';
  }
  return out.str();
}

std::string SpecHash(const ActionSet& spec) {
  const std::string text = SerializeActionSet(spec);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace reach
