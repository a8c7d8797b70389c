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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erm/annotation.hpp"
#include "erm/metrics.hpp"
#include "erm/segmentation.hpp"
#include "nlohmann/json.hpp"

namespace erm {

// Sub-corpus labels: human expert, human non-expert, LLM-generated.
enum class Group { HE, HN, LG };

std::string_view to_string(Group group);
std::optional<Group> group_from_string(std::string_view text);

struct Document {
  std::string doc_id;
  Group group = Group::HE;
  std::optional<std::string> model;  // generator name; LG only
  std::optional<std::string> topic;
  std::string text;
  std::size_t word_count = 0;
  std::filesystem::path source_path;
};

struct Corpus {
  std::vector<Document> documents;
  std::string corpus_version{"unversioned"};

  const Document* find(std::string_view doc_id) const;
  std::map<Group, std::size_t> group_sizes() const;
};

// Reads a JSON Lines manifest ({"doc_id", "group", "path", "model"?,
// "topic"?} per line; an optional header line carries "corpus_version")
// and loads every referenced text file. Paths resolve relative to the
// manifest's directory.
Corpus load_manifest(const std::filesystem::path& manifest_path);

// ---------------------------------------------------------------------------
// Persisted records
// ---------------------------------------------------------------------------

struct SegmentationRecord {
  struct SentenceEntry {
    std::size_t i = 0;
    std::string text;
    std::size_t words = 0;
  };
  struct ChunkEntry {
    std::size_t i = 0;
    std::size_t start = 0;  // half-open sentence range
    std::size_t end = 0;
    std::string label;
  };
  struct WindowEntry {
    std::size_t k = 0;
    std::size_t start = 0;  // half-open word range
    std::size_t end = 0;
  };

  std::string doc_id;
  std::string schema_version{kSchemaVersion};
  std::vector<SentenceEntry> sentences;
  std::vector<ChunkEntry> chunks;
  std::vector<WindowEntry> windows;
};

SegmentationRecord make_segmentation_record(std::string doc_id,
                                            const SentenceSequence& sentences,
                                            const ChunkSequence& chunks,
                                            const WindowPartition& windows);
nlohmann::json to_json(const SegmentationRecord& record);
SegmentationRecord segmentation_from_json(const nlohmann::json& value);

// In-memory sequences rebuilt from a persisted record. The surface text is
// the sentence texts joined by single spaces; spans index into it.
struct MaterializedSegmentation {
  std::string text;
  SentenceSequence sentences;
  ChunkSequence chunks;
  WindowPartition windows;
};
MaterializedSegmentation materialize(const SegmentationRecord& record);

struct AnnotationRecord {
  std::string doc_id;
  AnnotationVector vec;  // carries annotator_id and schema_version
};

nlohmann::json to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const nlohmann::json& value);

struct FeatureRecord {
  std::string doc_id;
  Group group = Group::HE;
  std::optional<std::string> model;
  std::string annotator_id;
  std::string schema_version{kSchemaVersion};
  DocumentFeatures features;
};

nlohmann::json to_json(const FeatureRecord& record);
FeatureRecord features_from_json(const nlohmann::json& value);

std::string features_csv_header();
std::string features_csv_row(const FeatureRecord& record);

// ---------------------------------------------------------------------------
// Store: a plain directory tree with an index file
// ---------------------------------------------------------------------------

enum class Stage { Segmentation, Annotation, Features };

std::string_view to_string(Stage stage);

// Layout under the root: segmentations/<doc>.json,
// annotations/<doc>__<annotator>.json, features/<doc>.json, index.json.
// Records are write-once (DuplicateRecord unless force) and version-guarded
// against the store header (SchemaError on mismatch). Writes are serialized
// by a single in-process writer lock; readers need no coordination.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  // Creates directories and the index header; SchemaError if an existing
  // header carries a different schema version.
  void initialize();

  const std::filesystem::path& root() const { return root_; }

  bool has_segmentation(std::string_view doc_id) const;
  void put_segmentation(const SegmentationRecord& record, bool force = false);
  SegmentationRecord get_segmentation(std::string_view doc_id) const;

  bool has_annotation(std::string_view doc_id,
                      std::string_view annotator_id) const;
  void put_annotation(const AnnotationRecord& record, bool force = false);
  AnnotationRecord get_annotation(std::string_view doc_id,
                                  std::string_view annotator_id) const;
  // All annotation records stored for a document.
  std::vector<AnnotationRecord> annotations_for(std::string_view doc_id) const;

  bool has_features(std::string_view doc_id) const;
  void put_features(const FeatureRecord& record, bool force = false);
  FeatureRecord get_features(std::string_view doc_id) const;

  // Raw record payloads for one document and stage, version-checked.
  // Throws NotFound when nothing is stored.
  std::vector<nlohmann::json> get_records(std::string_view doc_id,
                                          Stage stage) const;

 private:
  struct IndexEntry {
    std::string stage;
    std::string doc_id;
    std::string annotator_id;  // annotation stage only
    std::string path;          // relative to root
  };

  std::filesystem::path stage_dir(Stage stage) const;
  std::filesystem::path record_path(Stage stage, std::string_view doc_id,
                                    std::string_view annotator_id) const;
  void check_header() const;
  void write_record(Stage stage, std::string_view doc_id,
                    std::string_view annotator_id, const nlohmann::json& body,
                    std::string_view record_version, bool force);
  nlohmann::json read_record(const std::filesystem::path& path) const;
  void update_index(const IndexEntry& entry);

  std::filesystem::path root_;
};

}  // namespace erm
