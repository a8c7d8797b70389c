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

#include "erm/corpus.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include "erm/errors.hpp"
#include "erm/json_io.hpp"

namespace erm {

namespace {

std::mutex g_store_writer_mutex;

std::string require_string(const nlohmann::json& obj, const char* key,
                           const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::SchemaError,
                where + ": missing or non-string '" + key + "'");
  }
  return obj[key].get<std::string>();
}

std::size_t require_uint(const nlohmann::json& obj, const char* key,
                         const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
    throw Error(ErrorCode::SchemaError,
                where + ": missing or non-integer '" + key + "'");
  }
  return obj[key].get<std::size_t>();
}

double require_number(const nlohmann::json& obj, const char* key,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw Error(ErrorCode::SchemaError,
                where + ": missing or non-numeric '" + key + "'");
  }
  return obj[key].get<double>();
}

std::uint8_t require_bit(const nlohmann::json& obj, const char* key,
                         const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw Error(ErrorCode::SchemaError,
                where + ": missing or non-integer '" + key + "'");
  }
  const long long bit = obj[key].get<long long>();
  if (bit != 0 && bit != 1) {
    throw Error(ErrorCode::SchemaError, where + ": '" + key + "' not 0/1");
  }
  return static_cast<std::uint8_t>(bit);
}

nlohmann::json matrix_to_json(const BinaryMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row.push_back(static_cast<int>(m.at(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

BinaryMatrix matrix_from_json(const nlohmann::json& value, std::size_t cols,
                              const std::string& where) {
  if (!value.is_array()) {
    throw Error(ErrorCode::SchemaError, where + ": matrix must be an array");
  }
  BinaryMatrix m(value.size(), cols);
  for (std::size_t r = 0; r < value.size(); ++r) {
    const nlohmann::json& row = value[r];
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorCode::ShapeError,
                  where + ": row " + std::to_string(r) + " has " +
                      std::to_string(row.size()) + " entries, expected " +
                      std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number_integer() && !row[c].is_number_unsigned()) {
        throw Error(ErrorCode::SchemaError, where + ": non-integer cell");
      }
      const long long bit = row[c].get<long long>();
      if (bit != 0 && bit != 1) {
        throw Error(ErrorCode::SchemaError, where + ": cell not 0/1");
      }
      m.set(r, c, static_cast<std::uint8_t>(bit));
    }
  }
  return m;
}

}  // namespace

std::string_view to_string(Group group) {
  switch (group) {
    case Group::HE: return "HE";
    case Group::HN: return "HN";
    case Group::LG: return "LG";
  }
  return "?";
}

std::optional<Group> group_from_string(std::string_view text) {
  if (text == "HE") return Group::HE;
  if (text == "HN") return Group::HN;
  if (text == "LG") return Group::LG;
  return std::nullopt;
}

const Document* Corpus::find(std::string_view doc_id) const {
  for (const Document& d : documents) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

std::map<Group, std::size_t> Corpus::group_sizes() const {
  std::map<Group, std::size_t> sizes;
  for (const Document& d : documents) ++sizes[d.group];
  return sizes;
}

Corpus load_manifest(const std::filesystem::path& manifest_path) {
  const std::string raw = read_text_file(manifest_path);
  const std::filesystem::path base = manifest_path.parent_path();

  Corpus corpus;
  std::set<std::string> seen_ids;
  std::istringstream lines(raw);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.is_object()) {
      throw Error(ErrorCode::ParseError,
                  manifest_path.string() + ":" + std::to_string(line_no) +
                      ": invalid JSON line");
    }
    const std::string where =
        manifest_path.filename().string() + ":" + std::to_string(line_no);
    if (entry.contains("corpus_version") && !entry.contains("doc_id")) {
      corpus.corpus_version = require_string(entry, "corpus_version", where);
      continue;
    }

    Document doc;
    doc.doc_id = require_string(entry, "doc_id", where);
    if (!seen_ids.insert(doc.doc_id).second) {
      throw Error(ErrorCode::DuplicateId,
                  where + ": doc_id '" + doc.doc_id + "' repeats");
    }
    const std::string group_text = require_string(entry, "group", where);
    auto group = group_from_string(group_text);
    if (!group) {
      throw Error(ErrorCode::UnknownGroup,
                  where + ": group '" + group_text + "' is not HE/HN/LG");
    }
    doc.group = *group;
    if (entry.contains("model")) {
      if (doc.group != Group::LG) {
        throw Error(ErrorCode::ParseError,
                    where + ": 'model' is only valid for LG entries");
      }
      doc.model = require_string(entry, "model", where);
    }
    if (entry.contains("topic")) {
      doc.topic = require_string(entry, "topic", where);
    }
    std::filesystem::path rel = require_string(entry, "path", where);
    doc.source_path = rel.is_absolute() ? rel : base / rel;
    doc.text = read_text_file(doc.source_path);
    doc.word_count = tokenize_words(doc.text).size();
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

SegmentationRecord make_segmentation_record(std::string doc_id,
                                            const SentenceSequence& sentences,
                                            const ChunkSequence& chunks,
                                            const WindowPartition& windows) {
  SegmentationRecord record;
  record.doc_id = std::move(doc_id);
  for (const Sentence& s : sentences.sentences) {
    record.sentences.push_back({s.index, s.text, s.word_count});
  }
  for (const Chunk& c : chunks.chunks) {
    record.chunks.push_back(
        {c.index, c.begin_sentence, c.end_sentence,
         std::string(to_string(c.label))});
  }
  for (const Window& w : windows.windows) {
    record.windows.push_back({w.index, w.begin_word, w.end_word});
  }
  return record;
}

nlohmann::json to_json(const SegmentationRecord& record) {
  nlohmann::json doc;
  doc["doc_id"] = record.doc_id;
  doc["schema_version"] = record.schema_version;
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& s : record.sentences) {
    sentences.push_back({{"i", s.i}, {"text", s.text}, {"words", s.words}});
  }
  doc["sentences"] = std::move(sentences);
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : record.chunks) {
    chunks.push_back(
        {{"i", c.i}, {"start", c.start}, {"end", c.end}, {"label", c.label}});
  }
  doc["chunks"] = std::move(chunks);
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : record.windows) {
    windows.push_back({{"k", w.k}, {"start", w.start}, {"end", w.end}});
  }
  doc["windows"] = std::move(windows);
  return doc;
}

SegmentationRecord segmentation_from_json(const nlohmann::json& value) {
  SegmentationRecord record;
  record.doc_id = require_string(value, "doc_id", "segmentation record");
  record.schema_version =
      require_string(value, "schema_version", "segmentation record");
  for (const auto& s : value.value("sentences", nlohmann::json::array())) {
    record.sentences.push_back({require_uint(s, "i", "sentence entry"),
                                require_string(s, "text", "sentence entry"),
                                require_uint(s, "words", "sentence entry")});
  }
  for (const auto& c : value.value("chunks", nlohmann::json::array())) {
    record.chunks.push_back({require_uint(c, "i", "chunk entry"),
                             require_uint(c, "start", "chunk entry"),
                             require_uint(c, "end", "chunk entry"),
                             require_string(c, "label", "chunk entry")});
  }
  for (const auto& w : value.value("windows", nlohmann::json::array())) {
    record.windows.push_back({require_uint(w, "k", "window entry"),
                              require_uint(w, "start", "window entry"),
                              require_uint(w, "end", "window entry")});
  }
  return record;
}

MaterializedSegmentation materialize(const SegmentationRecord& record) {
  MaterializedSegmentation out;
  for (std::size_t i = 0; i < record.sentences.size(); ++i) {
    const auto& entry = record.sentences[i];
    Sentence s;
    s.index = entry.i;
    s.word_count = entry.words;
    if (!out.text.empty()) out.text += ' ';
    s.begin = out.text.size();
    out.text += entry.text;
    s.end = out.text.size();
    s.text = entry.text;
    out.sentences.sentences.push_back(std::move(s));
  }
  for (const auto& entry : record.chunks) {
    auto label = toulmin_from_string(entry.label);
    if (!label) {
      throw Error(ErrorCode::SchemaError,
                  "chunk label '" + entry.label + "' outside typology");
    }
    out.chunks.chunks.push_back({entry.i, entry.start, entry.end, *label});
  }
  std::size_t max_width = 0;
  for (const auto& entry : record.windows) {
    out.windows.windows.push_back({entry.k, entry.start, entry.end});
    max_width = std::max(max_width, entry.end - entry.start);
  }
  out.windows.window_size = max_width > 0 ? max_width : kDefaultWindowSize;
  return out;
}

nlohmann::json to_json(const AnnotationRecord& record) {
  nlohmann::json doc;
  doc["doc_id"] = record.doc_id;
  doc["annotator_id"] = record.vec.annotator_id;
  doc["schema_version"] = record.vec.schema_version;
  doc["m_d"] = record.vec.l1a.rows();
  doc["p"] = record.vec.l1b.rows();
  doc["lambda_1a"] = matrix_to_json(record.vec.l1a);
  doc["lambda_1b"] = matrix_to_json(record.vec.l1b);
  doc["lambda_1c"] = matrix_to_json(record.vec.l1c);
  doc["lambda_2a"] = matrix_to_json(record.vec.l2a);
  doc["lambda_2b"] = matrix_to_json(record.vec.l2b);
  doc["lambda_3"] = matrix_to_json(record.vec.l3);
  return doc;
}

AnnotationRecord annotation_from_json(const nlohmann::json& value) {
  AnnotationRecord record;
  record.doc_id = require_string(value, "doc_id", "annotation record");
  record.vec.annotator_id =
      require_string(value, "annotator_id", "annotation record");
  record.vec.schema_version =
      require_string(value, "schema_version", "annotation record");
  const std::size_t m = require_uint(value, "m_d", "annotation record");
  const std::size_t p = require_uint(value, "p", "annotation record");
  record.vec.l1a = matrix_from_json(value.value("lambda_1a", nlohmann::json()),
                                    column_count(Level::L1a), "lambda_1a");
  record.vec.l1b = matrix_from_json(value.value("lambda_1b", nlohmann::json()),
                                    column_count(Level::L1b), "lambda_1b");
  record.vec.l1c = matrix_from_json(value.value("lambda_1c", nlohmann::json()),
                                    column_count(Level::L1c), "lambda_1c");
  record.vec.l2a = matrix_from_json(value.value("lambda_2a", nlohmann::json()),
                                    column_count(Level::L2a), "lambda_2a");
  record.vec.l2b = matrix_from_json(value.value("lambda_2b", nlohmann::json()),
                                    column_count(Level::L2b), "lambda_2b");
  record.vec.l3 = matrix_from_json(value.value("lambda_3", nlohmann::json()),
                                   column_count(Level::L3), "lambda_3");
  validate_shapes(record.vec, m, p);
  return record;
}

nlohmann::json to_json(const FeatureRecord& record) {
  nlohmann::json doc;
  doc["doc_id"] = record.doc_id;
  doc["group"] = std::string(to_string(record.group));
  doc["model"] =
      record.model ? nlohmann::json(*record.model) : nlohmann::json(nullptr);
  doc["annotator_id"] = record.annotator_id;
  doc["schema_version"] = record.schema_version;
  doc["delta"] = record.features.delta;
  doc["gamma"] = record.features.gamma;
  doc["eta_norm"] = record.features.eta_norm
                        ? nlohmann::json(*record.features.eta_norm)
                        : nlohmann::json(nullptr);
  doc["sigma"] = static_cast<int>(record.features.sigma);
  doc["alpha"] = static_cast<int>(record.features.alpha);
  doc["pi"] = static_cast<int>(record.features.pi);
  doc["varsigma"] = static_cast<int>(record.features.varsigma);
  doc["rho"] = record.features.densities.rho;
  doc["eps_g"] = record.features.densities.eps_g;
  doc["eps_p"] = record.features.densities.eps_p;
  doc["m_d"] = record.features.densities.sentence_count;
  return doc;
}

FeatureRecord features_from_json(const nlohmann::json& value) {
  FeatureRecord record;
  record.doc_id = require_string(value, "doc_id", "feature record");
  auto group = group_from_string(require_string(value, "group", "feature record"));
  if (!group) {
    throw Error(ErrorCode::UnknownGroup, "feature record: bad group");
  }
  record.group = *group;
  if (value.contains("model") && value["model"].is_string()) {
    record.model = value["model"].get<std::string>();
  }
  record.annotator_id = value.value("annotator_id", std::string{});
  record.schema_version = value.value("schema_version", std::string{});
  const std::string where = "feature record";
  record.features.delta = require_number(value, "delta", where);
  record.features.gamma = require_number(value, "gamma", where);
  if (value.contains("eta_norm") && !value["eta_norm"].is_null()) {
    if (!value["eta_norm"].is_number()) {
      throw Error(ErrorCode::SchemaError, where + ": non-numeric 'eta_norm'");
    }
    record.features.eta_norm = value["eta_norm"].get<double>();
  }
  record.features.sigma = require_bit(value, "sigma", where);
  record.features.alpha = require_bit(value, "alpha", where);
  record.features.pi = require_bit(value, "pi", where);
  record.features.varsigma = require_bit(value, "varsigma", where);
  record.features.densities.rho = require_number(value, "rho", where);
  record.features.densities.eps_g = require_number(value, "eps_g", where);
  record.features.densities.eps_p = require_number(value, "eps_p", where);
  record.features.densities.sentence_count =
      require_uint(value, "m_d", where);
  return record;
}

std::string features_csv_header() {
  return "doc_id,group,model,delta,gamma,eta_norm,sigma,alpha,pi,varsigma,"
         "rho,eps_g,eps_p,m_d";
}

std::string features_csv_row(const FeatureRecord& record) {
  std::ostringstream row;
  row << record.doc_id << ',' << to_string(record.group) << ','
      << (record.model ? *record.model : "") << ','
      << format_double(record.features.delta) << ','
      << format_double(record.features.gamma) << ','
      << (record.features.eta_norm ? format_double(*record.features.eta_norm)
                                   : "")
      << ',' << static_cast<int>(record.features.sigma) << ','
      << static_cast<int>(record.features.alpha) << ','
      << static_cast<int>(record.features.pi) << ','
      << static_cast<int>(record.features.varsigma) << ','
      << format_double(record.features.densities.rho) << ','
      << format_double(record.features.densities.eps_g) << ','
      << format_double(record.features.densities.eps_p) << ','
      << record.features.densities.sentence_count;
  return row.str();
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Segmentation: return "segmentation";
    case Stage::Annotation: return "annotation";
    case Stage::Features: return "features";
  }
  return "?";
}

Store::Store(std::filesystem::path root) : root_(std::move(root)) {}

void Store::initialize() {
  std::scoped_lock lock(g_store_writer_mutex);
  std::filesystem::create_directories(root_ / "segmentations");
  std::filesystem::create_directories(root_ / "annotations");
  std::filesystem::create_directories(root_ / "features");
  const std::filesystem::path index = root_ / "index.json";
  if (std::filesystem::exists(index)) {
    check_header();
    return;
  }
  nlohmann::json header;
  header["schema_version"] = std::string(kSchemaVersion);
  header["records"] = nlohmann::json::array();
  write_text_file(index, canonical_dump(header));
}

void Store::check_header() const {
  const std::filesystem::path index = root_ / "index.json";
  if (!std::filesystem::exists(index)) {
    throw Error(ErrorCode::IoError,
                "store at " + root_.string() + " is not initialized");
  }
  nlohmann::json header = parse_json_file(index);
  const std::string version =
      require_string(header, "schema_version", "store header");
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::SchemaError,
                "store header schema_version '" + version +
                    "' does not match '" + std::string(kSchemaVersion) + "'");
  }
}

std::filesystem::path Store::stage_dir(Stage stage) const {
  switch (stage) {
    case Stage::Segmentation: return root_ / "segmentations";
    case Stage::Annotation: return root_ / "annotations";
    case Stage::Features: return root_ / "features";
  }
  return root_;
}

std::filesystem::path Store::record_path(Stage stage, std::string_view doc_id,
                                         std::string_view annotator_id) const {
  std::string name(doc_id);
  if (stage == Stage::Annotation) {
    name += "__";
    name += annotator_id;
  }
  name += ".json";
  return stage_dir(stage) / name;
}

void Store::write_record(Stage stage, std::string_view doc_id,
                         std::string_view annotator_id,
                         const nlohmann::json& body,
                         std::string_view record_version, bool force) {
  std::scoped_lock lock(g_store_writer_mutex);
  check_header();
  if (record_version != kSchemaVersion) {
    throw Error(ErrorCode::SchemaError,
                "record schema_version '" + std::string(record_version) +
                    "' does not match store header");
  }
  const std::filesystem::path path = record_path(stage, doc_id, annotator_id);
  if (std::filesystem::exists(path) && !force) {
    throw Error(ErrorCode::DuplicateRecord,
                path.filename().string() + " already stored (use force)");
  }
  write_text_file(path, canonical_dump(body));
  update_index({std::string(to_string(stage)), std::string(doc_id),
                std::string(annotator_id),
                std::filesystem::relative(path, root_).generic_string()});
}

void Store::update_index(const IndexEntry& entry) {
  const std::filesystem::path index_path = root_ / "index.json";
  nlohmann::json header = parse_json_file(index_path);
  nlohmann::json& records = header["records"];
  // Replace any existing entry for the same record (forced rewrite).
  nlohmann::json next = nlohmann::json::array();
  for (const auto& existing : records) {
    if (existing.value("path", "") == entry.path) continue;
    next.push_back(existing);
  }
  nlohmann::json added{{"stage", entry.stage},
                       {"doc_id", entry.doc_id},
                       {"path", entry.path}};
  if (!entry.annotator_id.empty()) added["annotator_id"] = entry.annotator_id;
  next.push_back(std::move(added));
  std::sort(next.begin(), next.end(),
            [](const nlohmann::json& a, const nlohmann::json& b) {
              return a.value("path", "") < b.value("path", "");
            });
  header["records"] = std::move(next);
  write_text_file(index_path, canonical_dump(header));
}

nlohmann::json Store::read_record(const std::filesystem::path& path) const {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::NotFound, path.filename().string() + " not stored");
  }
  nlohmann::json body = parse_json_file(path);
  const std::string version =
      require_string(body, "schema_version", "stored record");
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::SchemaError,
                path.filename().string() + " written under schema_version '" +
                    version + "'");
  }
  return body;
}

bool Store::has_segmentation(std::string_view doc_id) const {
  return std::filesystem::exists(record_path(Stage::Segmentation, doc_id, ""));
}

void Store::put_segmentation(const SegmentationRecord& record, bool force) {
  write_record(Stage::Segmentation, record.doc_id, "", to_json(record),
               record.schema_version, force);
}

SegmentationRecord Store::get_segmentation(std::string_view doc_id) const {
  check_header();
  return segmentation_from_json(
      read_record(record_path(Stage::Segmentation, doc_id, "")));
}

bool Store::has_annotation(std::string_view doc_id,
                           std::string_view annotator_id) const {
  return std::filesystem::exists(
      record_path(Stage::Annotation, doc_id, annotator_id));
}

void Store::put_annotation(const AnnotationRecord& record, bool force) {
  write_record(Stage::Annotation, record.doc_id, record.vec.annotator_id,
               to_json(record), record.vec.schema_version, force);
}

AnnotationRecord Store::get_annotation(std::string_view doc_id,
                                       std::string_view annotator_id) const {
  check_header();
  return annotation_from_json(
      read_record(record_path(Stage::Annotation, doc_id, annotator_id)));
}

std::vector<AnnotationRecord> Store::annotations_for(
    std::string_view doc_id) const {
  check_header();
  std::vector<AnnotationRecord> records;
  const std::string prefix = std::string(doc_id) + "__";
  std::vector<std::filesystem::path> paths;
  for (const auto& entry :
       std::filesystem::directory_iterator(stage_dir(Stage::Annotation))) {
    if (entry.path().filename().string().rfind(prefix, 0) == 0) {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    records.push_back(annotation_from_json(read_record(path)));
  }
  return records;
}

bool Store::has_features(std::string_view doc_id) const {
  return std::filesystem::exists(record_path(Stage::Features, doc_id, ""));
}

void Store::put_features(const FeatureRecord& record, bool force) {
  write_record(Stage::Features, record.doc_id, "", to_json(record),
               record.schema_version, force);
}

FeatureRecord Store::get_features(std::string_view doc_id) const {
  check_header();
  return features_from_json(
      read_record(record_path(Stage::Features, doc_id, "")));
}

std::vector<nlohmann::json> Store::get_records(std::string_view doc_id,
                                               Stage stage) const {
  check_header();
  std::vector<nlohmann::json> out;
  if (stage == Stage::Annotation) {
    const std::string prefix = std::string(doc_id) + "__";
    std::vector<std::filesystem::path> paths;
    for (const auto& entry :
         std::filesystem::directory_iterator(stage_dir(stage))) {
      if (entry.path().filename().string().rfind(prefix, 0) == 0) {
        paths.push_back(entry.path());
      }
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) out.push_back(read_record(path));
  } else {
    out.push_back(read_record(record_path(stage, doc_id, "")));
  }
  if (out.empty()) {
    throw Error(ErrorCode::NotFound,
                "no " + std::string(to_string(stage)) + " record for '" +
                    std::string(doc_id) + "'");
  }
  return out;
}

}  // namespace erm
