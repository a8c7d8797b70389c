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

#include <random>

#include "doctest.h"
#include "erm/errors.hpp"

using namespace erm;

namespace {

SentenceContext ctx(std::string_view text) { return {text, std::nullopt, false}; }

// Column indices in the L1a row.
constexpr std::size_t kTricolon = 0;
constexpr std::size_t kAnaphora = 1;
constexpr std::size_t kChiasmus = 2;
constexpr std::size_t kErotema = 3;
constexpr std::size_t kSententia = 4;

}  // namespace

TEST_CASE("tricolon detection") {
  CHECK(rule_annotate_sentence(
            ctx("The hypothesis is parsimonious, falsifiable, and "
                "empirically grounded."))
            .l1a[kTricolon] == 1);
  CHECK(rule_annotate_sentence(
            ctx("The evidence is plural, partial, and provisional."))
            .l1a[kTricolon] == 1);
  // Coordinated bare nouns still count when an explicit coordinator closes
  // the list.
  CHECK(rule_annotate_sentence(ctx("Advocates list the gains: focus, "
                                   "autonomy, and quiet."))
            .l1a[kTricolon] == 1);
  // Non-Oxford variant.
  CHECK(rule_annotate_sentence(
            ctx("The plan was unfunded, unstaffed and untested."))
            .l1a[kTricolon] == 1);

  CHECK(rule_annotate_sentence(
            ctx("Water boils at 100 degrees at sea level."))
            .l1a[kTricolon] == 0);
  // Appositive commas are not a list.
  CHECK(rule_annotate_sentence(ctx("The result, however, holds."))
            .l1a[kTricolon] == 0);
  // Four coordinated items are an enumeration, not a tricolon.
  CHECK(rule_annotate_sentence(
            ctx("We saw towns, farms, rivers, and roads."))
            .l1a[kTricolon] == 0);
  // Mismatched suffix shapes.
  CHECK(rule_annotate_sentence(
            ctx("The essays described a slower street, a patient craft, and "
                "a different audience."))
            .l1a[kTricolon] == 0);
}

TEST_CASE("anaphora needs a shared two-word opening with the previous "
          "sentence") {
  SentenceContext second{"Matter has extension.", "Matter has mass.", false};
  CHECK(rule_annotate_sentence(second).l1a[kAnaphora] == 1);

  SentenceContext different{"Energy has mass.", "Matter has mass.", false};
  CHECK(rule_annotate_sentence(different).l1a[kAnaphora] == 0);

  // No previous sentence: never flagged.
  CHECK(rule_annotate_sentence(ctx("Matter has mass.")).l1a[kAnaphora] == 0);

  // Shift consistency: prepending an unrelated sentence never flags the
  // opening sentence of the pair.
  SentenceContext opener{"Matter has mass.", "The seminar ended early.",
                         false};
  CHECK(rule_annotate_sentence(opener).l1a[kAnaphora] == 0);
}

TEST_CASE("chiasmus has no rule coverage") {
  CHECK(rule_annotate_sentence(
            ctx("We do not ask what language knows; we ask what language "
                "does."))
            .l1a[kChiasmus] == 0);
}

TEST_CASE("erotema: assertive frames only") {
  CHECK(rule_annotate_sentence(
            ctx("Can a calculus that has never been applied be said to have "
                "mathematical content?"))
            .l1a[kErotema] == 1);
  CHECK(rule_annotate_sentence(
            ctx("Is that really an answer to the people being photographed?"))
            .l1a[kErotema] == 1);
  CHECK(rule_annotate_sentence(ctx("Why?")).l1a[kErotema] == 0);
  // Second-person address reads as a genuine question.
  CHECK(rule_annotate_sentence(ctx("Do you really think that?"))
            .l1a[kErotema] == 0);
  CHECK(rule_annotate_sentence(ctx("It is an answer.")).l1a[kErotema] == 0);
}

TEST_CASE("sententia: aphoristic chunk-final present-tense statements") {
  SentenceContext final_ctx{"Form without warrant is persuasion without "
                            "truth.",
                            std::nullopt, true};
  CHECK(rule_annotate_sentence(final_ctx).l1a[kSententia] == 1);

  SentenceContext not_final = final_ctx;
  not_final.chunk_final = false;
  CHECK(rule_annotate_sentence(not_final).l1a[kSententia] == 0);

  SentenceContext with_deixis{"Our form without warrant is persuasion.",
                              std::nullopt, true};
  CHECK(rule_annotate_sentence(with_deixis).l1a[kSententia] == 0);

  SentenceContext past{"Form without warrant was persuasion.", std::nullopt,
                       true};
  CHECK(rule_annotate_sentence(past).l1a[kSententia] == 0);

  SentenceContext long_ctx{
      "Form without warrant is persuasion without truth in every venue "
      "where arguments are sold instead of earned today.",
      std::nullopt, true};
  CHECK(rule_annotate_sentence(long_ctx).l1a[kSententia] == 0);
}

TEST_CASE("genuine epistemic marker lexicons") {
  auto rows = rule_annotate_sentence(
      ctx("Given the ice loss, sea levels must be rising faster."));
  CHECK(rows.l2a[0] == 1);  // modal_auxiliaries

  rows = rule_annotate_sentence(
      ctx("The failure probably reflects sampling variance."));
  CHECK(rows.l2a[1] == 1);  // adverbial_expressions

  rows = rule_annotate_sentence(
      ctx("Judging by the biopsy results, the tumour may respond."));
  CHECK(rows.l2a[2] == 1);  // syntactic_restrictors
  CHECK(rows.l2a[0] == 1);  // "may"

  rows = rule_annotate_sentence(ctx("If the sample holds, the rest follows."));
  CHECK(rows.l2a[2] == 1);  // conditional if-clause

  rows = rule_annotate_sentence(
      ctx("The stratigraphic record suggests deposition under anaerobic "
          "conditions."));
  CHECK(rows.l2a[3] == 1);  // evidential_markers

  rows = rule_annotate_sentence(ctx("We observed a 0.3 mg deviation."));
  CHECK(rows.l2a[3] == 1);

  rows = rule_annotate_sentence(ctx("The survey argues for a revision."));
  CHECK(rows.l2a[3] == 1);  // reporting verb

  rows = rule_annotate_sentence(
      ctx("Water boils at 100 degrees at sea level."));
  CHECK(rows.l1a == std::vector<std::uint8_t>{0, 0, 0, 0, 0});
  CHECK(rows.l2a == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK(rows.l2b == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("performed epistemic marker lexicons") {
  auto rows = rule_annotate_sentence(
      ctx("The relationship between consciousness and neural activity is "
          "deeply nuanced and admits no easy answers."));
  CHECK(rows.l2b[0] == 1);  // complexity_tokens

  rows = rule_annotate_sentence(ctx("The problem is multi-faceted."));
  CHECK(rows.l2b[0] == 1);

  rows = rule_annotate_sentence(ctx("It depends on how one defines "
                                    "causation."));
  CHECK(rows.l2b[1] == 1);  // meta_epistemic_gestures

  rows = rule_annotate_sentence(
      ctx("From a certain perspective, free will and determinism are "
          "compatible."));
  CHECK(rows.l2b[1] == 1);

  // Matching is case-insensitive at the token level.
  rows = rule_annotate_sentence(ctx("IT DEPENDS on the definitions."));
  CHECK(rows.l2b[1] == 1);
}

TEST_CASE("rule annotation is a pure function of the context") {
  SentenceContext a{"Judging by the data, the tumour may respond.",
                    "A previous sentence.", true};
  auto first = rule_annotate_sentence(a);
  auto second = rule_annotate_sentence(a);
  CHECK(first.l1a == second.l1a);
  CHECK(first.l2a == second.l2a);
  CHECK(first.l2b == second.l2b);
}

TEST_CASE("rule backend pass coverage follows its mode") {
  RuleBackend full(/*cover_all_passes=*/true);
  CHECK(full.supports(Pass::SentenceRhetoric));
  CHECK(full.supports(Pass::SentenceEpistemic));
  CHECK(full.supports(Pass::ChunkRhetoric));
  CHECK(full.supports(Pass::DocumentLevel));
  CHECK(full.supports(Pass::Chunking));

  RuleBackend restricted(/*cover_all_passes=*/false);
  CHECK(restricted.supports(Pass::SentenceRhetoric));
  CHECK(restricted.supports(Pass::SentenceEpistemic));
  CHECK_FALSE(restricted.supports(Pass::ChunkRhetoric));
  CHECK_FALSE(restricted.supports(Pass::DocumentLevel));
  CHECK_FALSE(restricted.supports(Pass::Chunking));
  CHECK_THROWS_AS(restricted.annotate_chunk("text", ToulminLabel::Claim),
                  Error);
}

TEST_CASE("judgement-level passes zero-fill with a warning count") {
  RuleBackend backend(/*cover_all_passes=*/true);
  CHECK(backend.annotate_chunk("chunk text", ToulminLabel::Claim) ==
        std::vector<std::uint8_t>{0, 0, 0});
  DocumentRows rows = backend.annotate_document_level({});
  CHECK(rows.l1c == std::vector<std::uint8_t>{0, 0});
  CHECK(rows.l3 == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK(backend.zero_fill_count() == 2);
}

TEST_CASE("paragraph chunker tiles the document deterministically") {
  const std::string text =
      "The claim opens here. It continues briefly.\n\n"
      "The evidence section cites a study. The study measured drift.\n\n"
      "However, critics disagree.";
  SentenceSequence sentences = split_sentences(text);
  REQUIRE(sentences.size() == 5);

  RuleBackend backend;
  std::vector<ChunkProposal> proposals =
      backend.propose_chunks(sentences, text);
  REQUIRE(proposals.size() == 3);
  CHECK(proposals[0].begin_sentence == 0);
  CHECK(proposals[0].end_sentence == 2);
  CHECK(proposals[1].begin_sentence == 2);
  CHECK(proposals[1].end_sentence == 4);
  CHECK(proposals[2].begin_sentence == 4);
  CHECK(proposals[2].end_sentence == 5);
  CHECK(proposals[1].label == "Grounds");
  CHECK(proposals[2].label == "Rebuttal");

  ChunkSequence chunks =
      chunk_document(text, sentences, backend);
  CHECK(chunks.size() == 3);

  // Single paragraph: one covering chunk.
  const std::string flat = "One sentence. Two sentences.";
  SentenceSequence flat_sentences = split_sentences(flat);
  std::vector<ChunkProposal> flat_proposals =
      backend.propose_chunks(flat_sentences, flat);
  REQUIRE(flat_proposals.size() == 1);
  CHECK(flat_proposals[0].end_sentence == 2);
}
