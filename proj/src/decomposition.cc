#include "subchar/decomposition.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "subchar/tokens.h"

namespace subchar {

namespace {

bool is_description_operator(std::string_view symbol) {
  const auto cps = code_points(symbol);
  return cps.size() == 1 && ((cps[0] >= 0x2FF0 && cps[0] <= 0x2FFF) || cps[0] == 0x31EF);
}

std::vector<std::string> parse_units(std::string_view field, std::size_t line, const char* what) {
  std::vector<std::string> out;
  for (auto& sym : split_whitespace(field)) {
    if (is_description_operator(sym)) continue;
    if (!is_single_grapheme(sym) || tokens::is_reserved(sym)) {
      throw TableError(std::string("invalid ") + what + " symbol '" + sym + "'", line);
    }
    out.push_back(std::move(sym));
  }
  if (out.empty()) throw TableError(std::string("empty ") + what + " sequence", line);
  return out;
}

}  // namespace

DecompositionTable DecompositionTable::parse(std::string_view text) {
  DecompositionTable table;
  std::map<std::string, std::size_t> first_seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (!is_valid_utf8(line)) throw TableError("invalid UTF-8", line_no);
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw TableError("expected 3 tab-separated fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    const std::string character(trim(fields[0]));
    if (!is_single_grapheme(character) || tokens::is_reserved(character)) {
      throw TableError("invalid character field '" + character + "'", line_no);
    }
    if (auto it = first_seen.find(character); it != first_seen.end()) {
      throw TableError("duplicate entry for '" + character + "' (first defined on line " +
                           std::to_string(it->second) + ")",
                       line_no);
    }
    first_seen.emplace(character, line_no);
    CharEntry entry;
    entry.character = character;
    entry.ideographs = parse_units(fields[1], line_no, "ideograph");
    entry.strokes = parse_units(fields[2], line_no, "stroke");
    table.entries_.push_back(std::move(entry));
    if (end == text.size()) break;
  }

  // UTF-8 byte order is code-point order.
  std::sort(table.entries_.begin(), table.entries_.end(),
            [](const CharEntry& a, const CharEntry& b) { return a.character < b.character; });

  std::map<std::vector<std::string>, uint32_t> next_ideo, next_stroke;
  for (std::size_t i = 0; i < table.entries_.size(); ++i) {
    auto& e = table.entries_[i];
    e.ideo_tag = next_ideo[e.ideographs]++;
    e.stroke_tag = next_stroke[e.strokes]++;
    table.index_.emplace(e.character, i);
    table.reverse_ideo_.emplace(ReverseKey{e.ideographs, e.ideo_tag}, i);
    table.reverse_stroke_.emplace(ReverseKey{e.strokes, e.stroke_tag}, i);
    table.ideo_inventory_.insert(e.ideographs.begin(), e.ideographs.end());
    table.stroke_inventory_.insert(e.strokes.begin(), e.strokes.end());
  }
  if (table.reverse_ideo_.size() != table.entries_.size() ||
      table.reverse_stroke_.size() != table.entries_.size()) {
    throw Error("decomposition table is not injective");
  }
  return table;
}

DecompositionTable DecompositionTable::load(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

DecompositionTable DecompositionTable::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open decomposition table " + path);
  return load(in);
}

const CharEntry* DecompositionTable::find(std::string_view character) const {
  const auto it = index_.find(character);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::optional<std::string> DecompositionTable::lookup(DecompLevel level,
                                                      const std::vector<std::string>& units,
                                                      uint32_t tag) const {
  const auto& reverse = level == DecompLevel::Ideograph ? reverse_ideo_ : reverse_stroke_;
  const auto it = reverse.find(ReverseKey{units, tag});
  if (it == reverse.end()) return std::nullopt;
  return entries_[it->second].character;
}

UnitStream decompose_char(const DecompositionTable& table, std::string_view grapheme,
                          DecompLevel level) {
  UnitStream out;
  const CharEntry* entry = table.find(grapheme);
  if (entry == nullptr) {
    out.push_back(Unit::passthrough(std::string(grapheme)));
    return out;
  }
  for (const auto& sym : entry->units(level)) out.push_back(Unit::component(level, sym));
  out.push_back(Unit::eoc(entry->tag(level)));
  return out;
}

UnitStream encode_text(const DecompositionTable& table, const std::vector<std::string>& words,
                       DecompLevel level) {
  UnitStream out;
  bool first = true;
  for (const auto& word : words) {
    if (word.empty()) continue;
    if (!first) out.push_back(Unit::word_boundary());
    first = false;
    for (const auto& g : split_graphemes(word)) {
      auto units = decompose_char(table, g, level);
      out.insert(out.end(), std::make_move_iterator(units.begin()),
                 std::make_move_iterator(units.end()));
    }
  }
  return out;
}

std::vector<std::string> decode_text(const DecompositionTable& table, const UnitStream& stream,
                                     DecompLevel level, const DecodeOptions& options) {
  const UnitKind component = level == DecompLevel::Ideograph ? UnitKind::Ideograph : UnitKind::Stroke;
  std::vector<std::string> words;
  std::string word;
  std::vector<std::string> pending;
  std::size_t pending_start = 0;

  const auto flush_dangling = [&] {
    if (pending.empty()) return;
    if (!options.lenient) throw DecodeError("unit sequence without end-of-character marker", pending_start);
    word += options.unknown;
    pending.clear();
  };

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Unit& u = stream[i];
    switch (u.kind()) {
      case UnitKind::Ideograph:
      case UnitKind::Stroke:
        if (u.kind() != component) {
          if (!options.lenient) throw DecodeError("unit of the wrong decomposition level", i);
          flush_dangling();
          word += options.unknown;
          break;
        }
        if (pending.empty()) pending_start = i;
        pending.push_back(u.symbol());
        break;
      case UnitKind::EocMarker: {
        if (pending.empty()) {
          if (!options.lenient) throw DecodeError("end-of-character marker with no units", i);
          word += options.unknown;
          break;
        }
        auto ch = table.lookup(level, pending, u.tag());
        if (!ch) {
          if (!options.lenient) throw DecodeError("no character for unit sequence and tag", pending_start);
          word += options.unknown;
        } else {
          word += *ch;
        }
        pending.clear();
        break;
      }
      case UnitKind::Passthrough:
        flush_dangling();
        word += u.symbol();
        break;
      case UnitKind::WordBoundary:
        flush_dangling();
        if (!word.empty()) words.push_back(std::move(word));
        word.clear();
        break;
    }
  }
  flush_dangling();
  if (!word.empty()) words.push_back(std::move(word));
  return words;
}

CoverageReport coverage_stats(const DecompositionTable& table,
                              const std::vector<std::vector<std::string>>& corpus) {
  CoverageReport r;
  std::set<std::string> distinct, covered;
  for (const auto& sentence : corpus) {
    ++r.sentences;
    for (const auto& word : sentence) {
      for (const auto& g : split_graphemes(word)) {
        ++r.graphemes;
        distinct.insert(g);
        const CharEntry* e = table.find(g);
        if (e == nullptr) {
          ++r.passthrough;
          continue;
        }
        covered.insert(g);
        for (const auto& s : e->ideographs) ++r.ideograph_histogram[s];
        for (const auto& s : e->strokes) ++r.stroke_histogram[s];
      }
    }
  }
  r.distinct_characters = distinct.size();
  r.distinct_covered = covered.size();
  r.distinct_ideographs = r.ideograph_histogram.size();
  r.distinct_strokes = r.stroke_histogram.size();
  return r;
}

}  // namespace subchar
