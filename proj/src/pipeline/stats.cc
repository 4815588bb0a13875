#include "subchar/pipeline/stats.h"

#include <cstdio>
#include <set>

#include "subchar/pipeline/granularity.h"
#include "subchar/text.h"
#include "subchar/tokens.h"

namespace subchar::pipeline {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

StatsReport stats_report(const std::vector<std::string>& sentences, const DecompositionTable* table) {
  StatsReport r;
  r.sentences = sentences.size();
  std::vector<Granularity> levels{Granularity::Word, Granularity::Char};
  if (table != nullptr) {
    levels.push_back(Granularity::IdeographBpe);
    levels.push_back(Granularity::StrokeBpe);
  }
  for (Granularity g : levels) {
    const SideCodec codec(g, table);
    std::set<std::string> vocab, components;
    LevelStats s;
    s.level = g == Granularity::Word ? "word"
              : g == Granularity::Char ? "char"
              : g == Granularity::IdeographBpe ? "ideograph"
                                               : "stroke";
    std::size_t graphemes = 0, passthrough = 0;
    for (const auto& sent : sentences) {
      for (const auto& t : codec.base(sent)) {
        if (t == tokens::kWordBoundary) continue;
        ++s.tokens;
        vocab.insert(t);
      }
      if (uses_table(g)) {
        const DecompLevel dl = decomp_level(g);
        for (const auto& u : encode_text(*table, split_whitespace(sent), dl)) {
          if (u.kind() == UnitKind::Ideograph || u.kind() == UnitKind::Stroke) components.insert(u.symbol());
          if (u.kind() == UnitKind::Passthrough) ++passthrough;
          if (u.kind() == UnitKind::Passthrough || u.kind() == UnitKind::EocMarker) ++graphemes;
        }
      }
    }
    s.vocab = vocab.size();
    s.components = components.size();
    s.avg_length = r.sentences ? static_cast<double>(s.tokens) / static_cast<double>(r.sentences) : 0.0;
    s.passthrough_rate = graphemes ? static_cast<double>(passthrough) / static_cast<double>(graphemes) : 0.0;
    r.levels.push_back(s);
  }
  return r;
}

std::string StatsReport::csv() const {
  std::string out = "level,vocab,components,tokens,avg_length,passthrough_rate\n";
  for (const auto& l : levels) {
    out += l.level + "," + std::to_string(l.vocab) + "," + std::to_string(l.components) + "," +
           std::to_string(l.tokens) + "," + fixed(l.avg_length, 4) + "," + fixed(l.passthrough_rate, 4) + "\n";
  }
  return out;
}

std::string StatsReport::table() const {
  char buf[160];
  std::string out = "sentences: " + std::to_string(sentences) + "\n";
  std::snprintf(buf, sizeof buf, "%-10s %8s %11s %10s %10s %12s\n", "level", "vocab", "components", "tokens",
                "avg_len", "passthrough");
  out += buf;
  for (const auto& l : levels) {
    std::snprintf(buf, sizeof buf, "%-10s %8zu %11zu %10zu %10.2f %11.2f%%\n", l.level.c_str(), l.vocab,
                  l.components, l.tokens, l.avg_length, 100.0 * l.passthrough_rate);
    out += buf;
  }
  return out;
}

}  // namespace subchar::pipeline
