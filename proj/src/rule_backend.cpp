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

#include "erm/rule_backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "erm/errors.hpp"

namespace erm {

namespace {

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> word_list(std::string_view text, bool lowercase) {
  std::vector<std::string> out;
  for (const TokenSpan& span : tokenize_words(text)) {
    std::string word(text.substr(span.begin, span.end - span.begin));
    if (lowercase) word = to_lower(word);
    out.push_back(std::move(word));
  }
  return out;
}

bool contains_token(const std::vector<std::string>& words,
                    std::span<const std::string_view> lexicon) {
  for (const std::string& w : words) {
    for (std::string_view entry : lexicon) {
      if (w == entry) return true;
    }
  }
  return false;
}

// Consecutive-token phrase match over the lowercase word list.
bool contains_phrase(const std::vector<std::string>& words,
                     std::string_view phrase) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= phrase.size()) {
    std::size_t space = phrase.find(' ', start);
    if (space == std::string_view::npos) {
      parts.emplace_back(phrase.substr(start));
      break;
    }
    parts.emplace_back(phrase.substr(start, space - start));
    start = space + 1;
  }
  if (parts.empty() || parts.size() > words.size()) return false;
  for (std::size_t i = 0; i + parts.size() <= words.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (words[i + k] != parts[k]) {
        hit = false;
        break;
      }
    }
    if (hit) return true;
  }
  return false;
}

bool contains_any_phrase(const std::vector<std::string>& words,
                         std::span<const std::string_view> phrases) {
  for (std::string_view p : phrases) {
    if (contains_phrase(words, p)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Lexicons for the epistemic marker classes.
// ---------------------------------------------------------------------------

constexpr std::array<std::string_view, 6> kModalAuxiliaries = {
    "must", "might", "may", "could", "ought", "should"};

constexpr std::array<std::string_view, 8> kEpistemicAdverbials = {
    "certainly", "clearly",  "probably", "likely",
    "possibly",  "perhaps",  "apparently", "allegedly"};

constexpr std::array<std::string_view, 4> kRestrictorPhrases = {
    "judging by", "according to", "as far as", "given what"};

constexpr std::array<std::string_view, 2> kEvidentialPhrases = {
    "we observed", "we measured"};

constexpr std::array<std::string_view, 16> kEvidentialVerbs = {
    "suggests", "implies",   "indicates", "argues",    "claims",
    "reports",  "notes",     "states",    "observes",  "finds",
    "shows",    "demonstrates", "contends", "asserts", "maintains",
    "concludes"};

constexpr std::array<std::string_view, 4> kComplexityPhrases = {
    "deeply nuanced", "no easy answers", "profound questions",
    "deeply interconnected"};

constexpr std::array<std::string_view, 1> kComplexityTokens = {
    "multi-faceted"};

constexpr std::array<std::string_view, 3> kMetaEpistemicPhrases = {
    "it depends", "from a certain perspective", "on some level"};

constexpr std::array<std::string_view, 8> kCopulas = {
    "is", "are", "was", "were", "be", "been", "being", "am"};

constexpr std::array<std::string_view, 10> kQuestionModals = {
    "can", "could", "should", "must", "might",
    "may", "would", "shall", "will", "ought"};

constexpr std::array<std::string_view, 4> kSecondPerson = {
    "you", "your", "yours", "yourself"};

constexpr std::array<std::string_view, 12> kPersonDeixis = {
    "i", "we", "my", "our", "ours", "me", "us", "mine",
    "you", "your", "yours", "myself"};

constexpr std::array<std::string_view, 4> kPresentCopulas = {"is", "are",
                                                             "has", "have"};

constexpr std::array<std::string_view, 6> kPastMarkers = {
    "was", "were", "had", "did", "will", "would"};

// ---------------------------------------------------------------------------
// Tricolon: exactly three comma/and-coordinated constituents whose final
// words share a part-of-speech shape by suffix class.
// ---------------------------------------------------------------------------

enum class SuffixClass { Adjectival, Nominal, Adverbial, Unclassified };

SuffixClass suffix_class(const std::string& word) {
  static constexpr std::array<std::string_view, 14> adj = {
      "ous", "able", "ible", "ive", "ical", "ic",  "ful",
      "less", "ent", "ant",  "ed",  "ing",  "ary", "al"};
  static constexpr std::array<std::string_view, 12> noun = {
      "ion", "ment", "ness", "ity", "ance", "ence",
      "ism", "ship", "ure",  "age", "ancy", "ency"};
  auto ends_with = [&](std::string_view suffix) {
    return word.size() > suffix.size() + 1 &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) ==
               0;
  };
  if (ends_with("ly")) return SuffixClass::Adverbial;
  for (std::string_view s : adj) {
    if (ends_with(s)) return SuffixClass::Adjectival;
  }
  for (std::string_view s : noun) {
    if (ends_with(s)) return SuffixClass::Nominal;
  }
  return SuffixClass::Unclassified;
}

// Last alphabetic word of a constituent; adverb + head pairs ("empirically
// grounded") resolve to the head.
std::string constituent_head(std::string_view segment) {
  std::vector<std::string> words = word_list(segment, /*lowercase=*/true);
  if (words.empty()) return {};
  return words.back();
}

bool detect_tricolon(std::string_view text) {
  // Split on commas; drop a leading coordinator from the final constituent.
  std::vector<std::string_view> segments;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) {
      segments.push_back(text.substr(start));
      break;
    }
    segments.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }

  std::vector<std::string> heads;
  bool coordinated = false;
  if (segments.size() == 3) {
    // "A, B, and C" / "A, B, C"
    for (std::string_view seg : segments) heads.push_back(constituent_head(seg));
    std::vector<std::string> last_words =
        word_list(segments[2], /*lowercase=*/true);
    coordinated = !last_words.empty() &&
                  (last_words.front() == "and" || last_words.front() == "or");
  } else if (segments.size() == 2) {
    // "A, B and C"
    std::string lower = to_lower(segments[1]);
    std::size_t conj = lower.find(" and ");
    if (conj == std::string::npos) conj = lower.find(" or ");
    if (conj == std::string::npos) return false;
    heads.push_back(constituent_head(segments[0]));
    heads.push_back(constituent_head(segments[1].substr(0, conj)));
    heads.push_back(constituent_head(segments[1].substr(conj)));
    coordinated = true;
  } else {
    return false;  // fewer than two or more than three coordinated items
  }

  for (const std::string& h : heads) {
    if (h.empty() || h == "and" || h == "or") return false;
  }
  SuffixClass c0 = suffix_class(heads[0]);
  if (c0 != suffix_class(heads[1]) || c0 != suffix_class(heads[2])) {
    return false;
  }
  // Three unclassifiable heads only count when an explicit coordinator is
  // present; plain comma triples are usually appositives, not lists.
  if (c0 == SuffixClass::Unclassified && !coordinated) return false;
  return true;
}

bool detect_anaphora(std::string_view text,
                     std::optional<std::string_view> previous) {
  if (!previous) return false;
  std::vector<std::string> cur = word_list(text, /*lowercase=*/false);
  std::vector<std::string> prev = word_list(*previous, /*lowercase=*/false);
  if (cur.size() < 2 || prev.size() < 2) return false;
  return cur[0] == prev[0] && cur[1] == prev[1];
}

bool detect_erotema(std::string_view text,
                    const std::vector<std::string>& words) {
  // Terminal question mark, ignoring trailing quotes/brackets.
  std::size_t end = text.size();
  while (end > 0) {
    char c = text[end - 1];
    if (c == '"' || c == '\'' || c == ')' || c == ']') {
      --end;
      continue;
    }
    break;
  }
  if (end == 0 || text[end - 1] != '?') return false;
  if (contains_token(words, kSecondPerson)) return false;
  return contains_token(words, kQuestionModals) ||
         contains_token(words, kCopulas);
}

bool detect_sententia(std::string_view text,
                      const std::vector<std::string>& words,
                      bool chunk_final) {
  if (!chunk_final) return false;
  if (words.empty() || words.size() > 15) return false;
  if (!text.empty() && text.find('?') != std::string_view::npos) return false;
  if (contains_token(words, kPersonDeixis)) return false;
  if (contains_token(words, kPastMarkers)) return false;
  return contains_token(words, kPresentCopulas);
}

// ---------------------------------------------------------------------------
// Deterministic Toulmin chunking: paragraphs become chunks; labels come from
// an ordered cue scan. A stand-in for judgement-based segmentation, chosen
// so the rule-only pipeline is reproducible end to end.
// ---------------------------------------------------------------------------

ToulminLabel heuristic_label(const std::string& lower_text,
                             std::size_t sentence_count, bool first) {
  std::vector<std::string> words = word_list(lower_text, /*lowercase=*/true);
  static constexpr std::array<std::string_view, 3> non_arg = {
      "for example", "for instance", "to illustrate"};
  static constexpr std::array<std::string_view, 4> claim = {
      "therefore", "thus", "in conclusion", "taken together"};
  static constexpr std::array<std::string_view, 4> rebuttal = {
      "however", "critics", "objection", "skeptics"};
  static constexpr std::array<std::string_view, 3> qualifier = {
      "if", "unless", "assuming"};
  static constexpr std::array<std::string_view, 3> backing = {
      "literature", "scholars", "consensus"};
  static constexpr std::array<std::string_view, 8> grounds = {
      "because", "since", "evidence", "data",
      "study",   "studies", "observed", "measured"};

  if (sentence_count <= 2 && contains_any_phrase(words, non_arg)) {
    return ToulminLabel::NonArgumentative;
  }
  if (contains_any_phrase(words, claim)) return ToulminLabel::Claim;
  if (contains_any_phrase(words, rebuttal)) return ToulminLabel::Rebuttal;
  if (contains_any_phrase(words, qualifier)) return ToulminLabel::Qualifier;
  if (contains_any_phrase(words, backing)) return ToulminLabel::Backing;
  if (contains_any_phrase(words, grounds)) return ToulminLabel::Grounds;
  if (first) return ToulminLabel::Claim;
  return ToulminLabel::Warrant;
}

}  // namespace

RuleSentenceRows rule_annotate_sentence(const SentenceContext& ctx) {
  RuleSentenceRows rows;
  const std::vector<std::string> words =
      word_list(ctx.text, /*lowercase=*/true);

  rows.l1a = {
      static_cast<std::uint8_t>(detect_tricolon(ctx.text) ? 1 : 0),
      static_cast<std::uint8_t>(detect_anaphora(ctx.text, ctx.previous) ? 1
                                                                        : 0),
      0,  // chiasmus: judgement-level, no rule coverage
      static_cast<std::uint8_t>(detect_erotema(ctx.text, words) ? 1 : 0),
      static_cast<std::uint8_t>(
          detect_sententia(ctx.text, words, ctx.chunk_final) ? 1 : 0),
  };

  const bool restrictor = contains_any_phrase(words, kRestrictorPhrases) ||
                          contains_token(words, std::array<std::string_view, 1>{
                                                    std::string_view("if")});
  const bool evidential = contains_any_phrase(words, kEvidentialPhrases) ||
                          contains_token(words, kEvidentialVerbs);
  rows.l2a = {
      static_cast<std::uint8_t>(contains_token(words, kModalAuxiliaries) ? 1
                                                                         : 0),
      static_cast<std::uint8_t>(contains_token(words, kEpistemicAdverbials)
                                    ? 1
                                    : 0),
      static_cast<std::uint8_t>(restrictor ? 1 : 0),
      static_cast<std::uint8_t>(evidential ? 1 : 0),
  };

  const bool complexity = contains_any_phrase(words, kComplexityPhrases) ||
                          contains_token(words, kComplexityTokens);
  rows.l2b = {
      static_cast<std::uint8_t>(complexity ? 1 : 0),
      static_cast<std::uint8_t>(
          contains_any_phrase(words, kMetaEpistemicPhrases) ? 1 : 0),
  };
  return rows;
}

bool RuleBackend::supports(Pass pass) const {
  switch (pass) {
    case Pass::SentenceRhetoric:
    case Pass::SentenceEpistemic: return true;
    case Pass::ChunkRhetoric:
    case Pass::DocumentLevel:
    case Pass::Chunking: return cover_all_passes_;
  }
  return false;
}

SentenceRhetoricRow RuleBackend::annotate_sentence_rhetoric(
    const SentenceContext& ctx) {
  return {rule_annotate_sentence(ctx).l1a};
}

SentenceEpistemicRows RuleBackend::annotate_sentence_epistemic(
    const SentenceContext& ctx) {
  RuleSentenceRows rows = rule_annotate_sentence(ctx);
  return {std::move(rows.l2a), std::move(rows.l2b)};
}

std::vector<std::uint8_t> RuleBackend::annotate_chunk(std::string_view,
                                                      ToulminLabel) {
  if (!cover_all_passes_) {
    throw Error(ErrorCode::UnsupportedPass,
                "rule backend has no chunk-level coverage");
  }
  ++zero_fill_count_;
  return std::vector<std::uint8_t>(column_count(Level::L1b), 0);
}

DocumentRows RuleBackend::annotate_document_level(const DocumentContext&) {
  if (!cover_all_passes_) {
    throw Error(ErrorCode::UnsupportedPass,
                "rule backend has no document-level coverage");
  }
  ++zero_fill_count_;
  return {std::vector<std::uint8_t>(column_count(Level::L1c), 0),
          std::vector<std::uint8_t>(column_count(Level::L3), 0)};
}

std::vector<ChunkProposal> RuleBackend::propose_chunks(
    const SentenceSequence& sentences, std::string_view doc_text) {
  if (!cover_all_passes_) {
    throw Error(ErrorCode::UnsupportedPass,
                "rule backend does not propose chunks");
  }
  const std::size_t m = sentences.size();
  // Paragraph break: a blank line in the gap between adjacent sentences.
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 1; i < m; ++i) {
    std::size_t gap_begin = sentences.sentences[i - 1].end;
    std::size_t gap_end = sentences.sentences[i].begin;
    std::string_view gap = doc_text.substr(gap_begin, gap_end - gap_begin);
    if (std::count(gap.begin(), gap.end(), '\n') >= 2) starts.push_back(i);
  }
  starts.push_back(m);

  std::vector<ChunkProposal> proposals;
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    std::size_t begin = starts[k];
    std::size_t end = starts[k + 1];
    std::size_t text_begin = sentences.sentences[begin].begin;
    std::size_t text_end = sentences.sentences[end - 1].end;
    std::string lower =
        to_lower(doc_text.substr(text_begin, text_end - text_begin));
    ToulminLabel label = heuristic_label(lower, end - begin, k == 0);
    proposals.push_back({begin, end, std::string(to_string(label))});
  }
  return proposals;
}

}  // namespace erm
