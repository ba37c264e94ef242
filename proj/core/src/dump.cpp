#include "areon/dump.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace areon {

namespace {

std::string hex_u64(std::uint64_t v) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
  (void)ec;
  return std::string(buf, p);
}

std::string y_str(double y) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, y);
  (void)ec;
  return std::string(buf, p);
}

bool parse_hex(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t c = s.find(sep, pos);
    if (c == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, c - pos));
    pos = c + 1;
  }
  return out;
}

}  // namespace

std::string dump_dag(const DagStore& store, const DagView& view) {
  std::ostringstream o;
  for (BlockIdx i : store.key_order()) {
    if (!view.contains(i)) continue;
    const Block& b = store.block(i);
    o << hex_u64(b.id) << '\t' << b.slot << '\t';
    if (b.validator == kNoValidator) o << '-';
    else o << b.validator;
    o << '\t' << y_str(b.y) << '\t';
    if (b.short_refs.empty()) o << '-';
    else
      for (std::size_t k = 0; k < b.short_refs.size(); ++k) {
        if (k) o << ',';
        o << hex_u64(b.short_refs[k]);
      }
    o << '|';
    if (b.long_ref) o << hex_u64(*b.long_ref);
    else o << '-';
    o << '\t';
    if (b.payload.is_empty) o << "-\t-";
    else o << hex_u64(b.payload.conflict_key) << '\t'
          << hex_u64(b.payload.tx_id);
    o << '\n';
  }
  return o.str();
}

Expected<ParsedDag, ParseError> parse_dag(const std::string& text) {
  struct Line {
    int no;
    Block b;
  };
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    auto fields = split(raw, '\t');
    if (fields.size() != 7)
      return ParseError{lineno, "expected 7 tab-separated fields"};
    Block b;
    if (!parse_hex(fields[0], b.id)) return ParseError{lineno, "bad id"};
    {
      auto [p, ec] = std::from_chars(
          fields[1].data(), fields[1].data() + fields[1].size(), b.slot);
      if (ec != std::errc() || p != fields[1].data() + fields[1].size())
        return ParseError{lineno, "bad slot"};
    }
    if (fields[2] == "-") {
      b.validator = kNoValidator;
    } else {
      auto [p, ec] = std::from_chars(
          fields[2].data(), fields[2].data() + fields[2].size(), b.validator);
      if (ec != std::errc() || p != fields[2].data() + fields[2].size())
        return ParseError{lineno, "bad validator"};
    }
    {
      auto [p, ec] = std::from_chars(
          fields[3].data(), fields[3].data() + fields[3].size(), b.y);
      if (ec != std::errc() || p != fields[3].data() + fields[3].size())
        return ParseError{lineno, "bad y"};
    }
    auto ref_sides = split(fields[4], '|');
    if (ref_sides.size() != 2)
      return ParseError{lineno, "refs field needs exactly one '|'"};
    if (ref_sides[0] != "-")
      for (const auto& part : split(ref_sides[0], ',')) {
        std::uint64_t r;
        if (!parse_hex(part, r)) return ParseError{lineno, "bad short ref"};
        b.short_refs.push_back(r);
      }
    if (ref_sides[1] != "-") {
      std::uint64_t r;
      if (!parse_hex(ref_sides[1], r)) return ParseError{lineno, "bad long ref"};
      b.long_ref = r;
    }
    if ((fields[5] == "-") != (fields[6] == "-"))
      return ParseError{lineno, "payload fields must both be set or both '-'"};
    if (fields[5] != "-") {
      b.payload.is_empty = false;
      if (!parse_hex(fields[5], b.payload.conflict_key))
        return ParseError{lineno, "bad conflict_key"};
      if (!parse_hex(fields[6], b.payload.tx_id))
        return ParseError{lineno, "bad tx_id"};
    }
    b.auth_valid = true;
    lines.push_back({lineno, std::move(b)});
  }
  if (lines.empty()) return ParseError{0, "empty dump"};

  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& c) {
    BlockKey ka{a.b.slot, a.b.y, a.b.id};
    BlockKey kc{c.b.slot, c.b.y, c.b.id};
    return ka < kc;
  });
  const Block& g = lines.front().b;
  if (g.slot != 0 || !g.short_refs.empty() || g.long_ref)
    return ParseError{lines.front().no,
                      "first block by key must be a slot-0 genesis"};

  auto store = std::make_unique<DagStore>(g);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto res = store->insert(lines[i].b);
    if (!res) {
      const char* why = res.error() == StoreError::duplicate_id
                            ? "duplicate id"
                            : "unknown reference";
      return ParseError{lines[i].no, why};
    }
  }
  DagView view(*store);
  for (BlockIdx i = 1; i < store->size(); ++i) view.add(i);
  // view.add asserts parents-present, which insertion order guarantees.
  return ParsedDag{std::move(store), std::move(view)};
}

}  // namespace areon
