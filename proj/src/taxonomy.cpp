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

#include "erm/taxonomy.hpp"

#include <array>
#include <fstream>

#include "erm/errors.hpp"
#include "nlohmann/json.hpp"

namespace erm {

namespace {

// Definitions double as LLM annotation instructions; examples are the
// canonical exemplar sentences shipped with the schema.
constexpr std::array<MarkerInfo, 5> kLevel1a = {{
    {Level::L1a, "tricolon",
     "Three parallel syntactic units in succession, producing a sense of "
     "rhetorical completeness through numerical symmetry.",
     "The hypothesis is parsimonious, falsifiable, and empirically "
     "grounded."},
    {Level::L1a, "anaphora",
     "An identical word or phrase repeated at the opening of consecutive "
     "clauses or sentences, generating cumulative emphasis.",
     "Matter has mass. Matter has extension. Matter has inertia."},
    {Level::L1a, "chiasmus",
     "AB-BA inversion of grammatical or semantic elements across two "
     "successive clauses, foregrounding opposition or resolution.",
     "We do not ask what language knows; we ask what language does."},
    {Level::L1a, "erotema",
     "A rhetorical question that asserts rather than enquires, presupposing "
     "a shared answer and enlisting reader assent.",
     "Can a calculus that has never been applied be said to have "
     "mathematical content?"},
    {Level::L1a, "sententia",
     "A self-contained aphoristic statement closing an argument with "
     "general, present-tense propositional force, free of first- and "
     "second-person deixis.",
     "Form without warrant is persuasion without truth."},
}};

constexpr std::array<MarkerInfo, 3> kLevel1b = {{
    {Level::L1b, "correctio",
     "A mid-argument self-correction that retracts or intensifies a prior "
     "formulation via explicit metalinguistic markers, performing "
     "deliberateness rather than genuine revision.",
     "The data support the hypothesis - or rather, are consistent with it "
     "under one interpretation."},
    {Level::L1b, "enumeratio",
     "Structured listing of three or more supporting points or sub-claims "
     "introduced by ordinal cues, creating the impression of comprehensive "
     "coverage.",
     "Three factors drive the result: sampling variance, measurement error, "
     "and model misspecification."},
    {Level::L1b, "auxesis",
     "Successive clauses or phrases arranged in strictly ascending semantic "
     "or affective intensity, producing a climactic crescendo effect.",
     "The discrepancy is notable, statistically significant, and "
     "theoretically fatal to the standard account."},
}};

constexpr std::array<MarkerInfo, 2> kLevel1c = {{
    {Level::L1c, "peripeteia",
     "A sudden reversal of the argument's established evaluative or "
     "epistemic direction, in which an apparent trajectory is abruptly "
     "inverted at the discourse level.",
     "All measurements confirmed the classical prediction. Yet the 1919 "
     "eclipse data required a fundamentally different theory to explain "
     "them."},
    {Level::L1c, "evr",
     "A three-phase arc in which an expectation is established, explicitly "
     "violated, and then resolved or reframed, producing the effect of "
     "discovery or insight.",
     "For decades, the prevailing assumption held that stomach ulcers were "
     "caused by stress and excess acid. In 1984, Marshall and Warren "
     "demonstrated that the majority of cases were caused by a bacterial "
     "infection. This reframed ulcers as an infectious disease, curable "
     "with a standard course of antibiotics."},
}};

constexpr std::array<MarkerInfo, 4> kLevel2a = {{
    {Level::L2a, "modal_auxiliaries",
     "Modal verbs expressing epistemic necessity (must) or possibility "
     "(might, may, could) relative to an evidential base; ought and should "
     "signal weak inferential necessity.",
     "Given the rate of polar ice loss, sea levels must be rising faster "
     "than nineteenth-century models predicted."},
    {Level::L2a, "adverbial_expressions",
     "Sentence adverbials calibrating speaker commitment across a gradient "
     "from certainty (certainly, clearly) through probability (probably, "
     "likely) and possibility (possibly, perhaps) to source attribution "
     "(apparently, allegedly).",
     "The replication failure probably reflects sampling variance rather "
     "than a genuine reversal of the effect."},
    {Level::L2a, "syntactic_restrictors",
     "Constructions that restrict the evidential base of a modal or "
     "judgement: conditional if-clauses, parenthetical source attributions, "
     "and restrictor phrases such as judging by, according to, as far as, "
     "given what we know.",
     "Judging by the biopsy results, the tumour may respond to targeted "
     "therapy."},
    {Level::L2a, "evidential_markers",
     "Markers specifying the type of evidence underlying a claim: direct "
     "(we observed, we measured), indirect reported (according to, "
     "reporting verbs), or indirect inferential (suggests, implies, "
     "indicates).",
     "The stratigraphic record suggests deposition under anaerobic "
     "conditions."},
}};

constexpr std::array<MarkerInfo, 2> kLevel2b = {{
    {Level::L2b, "complexity_tokens",
     "Fixed phrasal chunks that invoke irreducible complexity without "
     "identifying a source of uncertainty, restricting an evidential base, "
     "or calibrating modal force.",
     "The relationship between consciousness and neural activity is deeply "
     "nuanced and admits no easy answers."},
    {Level::L2b, "meta_epistemic_gestures",
     "Utterances that foreground conditionality or perspective-relativity "
     "as a performance of reflexivity, without specifying the condition or "
     "perspective.",
     "It depends on how one defines causation."},
}};

constexpr std::array<MarkerInfo, 4> kLevel3 = {{
    {Level::L3, "aporetic_endpoint",
     "The argument terminates in explicitly sustained uncertainty, "
     "withholding resolution on the grounds that the available evidence "
     "underdetermines a conclusion.",
     "Whether dark matter consists of weakly interacting massive particles "
     "or axions remains an open question that current detection "
     "sensitivities cannot resolve."},
    {Level::L3, "synthetic_closure",
     "The argument arrives at a positive, integrated conclusion that "
     "synthesises prior competing considerations into a unified claim, "
     "signalled by conclusive discourse connectives.",
     "Taken together, the fossil record, the genetic data, and the "
     "biogeographic distribution confirm that the two populations diverged "
     "no later than the Pleistocene."},
    {Level::L3, "premature_closure",
     "A closure move in which resolution is asserted before the inferential "
     "structure of the argument warrants it, typically signalled by "
     "explicit certainty tokens that short-circuit the argument.",
     "While these questions are admittedly complex, it is clear that the "
     "hard problem of consciousness is a pseudoproblem."},
    {Level::L3, "speculative_depth",
     "A sustained chain of conditional or hypothetical reasoning extending "
     "inferentially beyond the argument's established evidential base, "
     "characterised by nested if-then structures or stacked modal scopes.",
     "If LLMs encode syntactic structure, and if that encoding extends to "
     "semantic compositionality, then such systems might possess a "
     "rudimentary form of understanding."},
}};

constexpr std::array<std::string_view, kToulminLabelCount> kToulminNames = {
    "Claim",     "Grounds",  "Warrant",          "Backing",
    "Qualifier", "Rebuttal", "NonArgumentative",
};

}  // namespace

std::span<const MarkerInfo> marker_inventory(Level level) {
  switch (level) {
    case Level::L1a: return kLevel1a;
    case Level::L1b: return kLevel1b;
    case Level::L1c: return kLevel1c;
    case Level::L2a: return kLevel2a;
    case Level::L2b: return kLevel2b;
    case Level::L3: return kLevel3;
  }
  return {};
}

std::span<const MarkerInfo> all_markers() {
  static const std::array<MarkerInfo, 20> all = [] {
    std::array<MarkerInfo, 20> out{};
    std::size_t i = 0;
    for (Level level : {Level::L1a, Level::L1b, Level::L1c, Level::L2a,
                        Level::L2b, Level::L3}) {
      for (const MarkerInfo& m : marker_inventory(level)) out[i++] = m;
    }
    return out;
  }();
  return all;
}

Granularity granularity_of(Level level) {
  switch (level) {
    case Level::L1a:
    case Level::L2a:
    case Level::L2b: return Granularity::Sentence;
    case Level::L1b: return Granularity::Chunk;
    case Level::L1c:
    case Level::L3: return Granularity::Document;
  }
  return Granularity::Sentence;
}

Granularity granularity_of(const MarkerInfo& marker) {
  return granularity_of(marker.level);
}

std::size_t column_count(Level level) {
  return marker_inventory(level).size();
}

const MarkerInfo* find_marker(std::string_view name) {
  for (const MarkerInfo& m : all_markers()) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::L1a: return "1a";
    case Level::L1b: return "1b";
    case Level::L1c: return "1c";
    case Level::L2a: return "2a";
    case Level::L2b: return "2b";
    case Level::L3: return "3";
  }
  return "?";
}

std::optional<Level> level_from_string(std::string_view text) {
  if (text == "1a") return Level::L1a;
  if (text == "1b") return Level::L1b;
  if (text == "1c") return Level::L1c;
  if (text == "2a") return Level::L2a;
  if (text == "2b") return Level::L2b;
  if (text == "3") return Level::L3;
  return std::nullopt;
}

std::string_view to_string(Granularity unit) {
  switch (unit) {
    case Granularity::Sentence: return "sentence";
    case Granularity::Chunk: return "chunk";
    case Granularity::Document: return "document";
  }
  return "?";
}

std::string_view to_string(ToulminLabel label) {
  return kToulminNames[static_cast<std::size_t>(label)];
}

std::optional<ToulminLabel> toulmin_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kToulminNames.size(); ++i) {
    if (kToulminNames[i] == text) return static_cast<ToulminLabel>(i);
  }
  return std::nullopt;
}

std::string taxonomy_json() {
  nlohmann::json doc;
  doc["schema_version"] = std::string(kSchemaVersion);
  nlohmann::json markers = nlohmann::json::array();
  for (const MarkerInfo& m : all_markers()) {
    markers.push_back({
        {"name", std::string(m.name)},
        {"level", std::string(to_string(m.level))},
        {"granularity", std::string(to_string(granularity_of(m)))},
        {"definition", std::string(m.definition)},
        {"example", std::string(m.example)},
    });
  }
  doc["markers"] = markers;
  nlohmann::json labels = nlohmann::json::array();
  for (std::string_view name : kToulminNames) labels.push_back(std::string(name));
  doc["toulmin_labels"] = labels;
  return doc.dump(2) + "\n";
}

void write_taxonomy_json(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError,
                "cannot open " + path.string() + " for writing");
  }
  out << taxonomy_json();
}

}  // namespace erm
