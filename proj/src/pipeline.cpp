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

#include "erm/pipeline.hpp"

#include <atomic>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "erm/corpus.hpp"
#include "erm/errors.hpp"
#include "erm/json_io.hpp"
#include "erm/report.hpp"
#include "erm/rule_backend.hpp"

namespace erm {

namespace {

struct FailureList {
  std::mutex mutex;
  std::vector<std::string> entries;

  void add(const std::string& doc_id, const std::string& what) {
    std::scoped_lock lock(mutex);
    entries.push_back(doc_id + ": " + what);
  }
};

// Document-level parallelism, bounded by the configured job count. Worker
// exceptions are routed into per-document failures by the callback itself.
void for_each_document(std::size_t count, std::size_t jobs,
                       const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const std::size_t worker_count = std::min(jobs, count);
  workers.reserve(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (std::thread& t : workers) t.join();
}

int finish(const FailureList& failures, std::ostream& err) {
  if (failures.entries.empty()) return kExitOk;
  err << failures.entries.size() << " document(s) failed:\n";
  for (const std::string& entry : failures.entries) {
    err << "  " << entry << "\n";
  }
  return kExitPartial;
}

struct BackendSet {
  std::unique_ptr<RuleBackend> rule;
  std::unique_ptr<LlmBackend> llm;
  AnnotatorBackend* primary = nullptr;
  AnnotatorBackend* fallback = nullptr;
  AnnotatorBackend* chunker = nullptr;
};

// Backend policy: rule covers everything itself (zero-filling the
// judgement-level passes); llm covers everything remotely; hybrid runs the
// sentence passes through rules and routes chunking and the judgement-level
// passes to the LLM.
BackendSet make_backends(const RunConfig& config) {
  BackendSet set;
  switch (config.backend) {
    case BackendKind::Rule:
      set.rule = std::make_unique<RuleBackend>(/*cover_all_passes=*/true);
      set.primary = set.rule.get();
      set.chunker = set.rule.get();
      break;
    case BackendKind::Llm:
      set.llm = std::make_unique<LlmBackend>(config.llm ? *config.llm
                                                        : LlmConfig::from_env());
      set.primary = set.llm.get();
      set.chunker = set.llm.get();
      break;
    case BackendKind::Hybrid:
      set.rule = std::make_unique<RuleBackend>(/*cover_all_passes=*/false);
      set.llm = std::make_unique<LlmBackend>(config.llm ? *config.llm
                                                        : LlmConfig::from_env());
      set.primary = set.rule.get();
      set.fallback = set.llm.get();
      set.chunker = set.llm.get();
      break;
  }
  return set;
}

std::string annotator_id_of(const BackendSet& set) {
  std::string id = set.primary->id();
  if (set.fallback != nullptr && set.fallback->id() != set.primary->id()) {
    id += "+" + set.fallback->id();
  }
  return id;
}

// Shared preamble: manifest + initialized store, with configuration errors
// mapped to exit code 2 by the caller.
struct Session {
  Corpus corpus;
  Store store;
};

Session open_session(const RunConfig& config) {
  Session session{load_manifest(config.manifest_path),
                  Store(config.output_dir)};
  std::filesystem::create_directories(config.output_dir);
  session.store.initialize();
  return session;
}

std::map<Group, std::pair<double, std::size_t>> group_means(
    const std::vector<std::pair<Group, double>>& values) {
  std::map<Group, std::pair<double, std::size_t>> sums;
  for (const auto& [group, value] : values) {
    sums[group].first += value;
    sums[group].second += 1;
  }
  return sums;
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Rule: return "rule";
    case BackendKind::Llm: return "llm";
    case BackendKind::Hybrid: return "hybrid";
  }
  return "?";
}

std::optional<BackendKind> backend_from_string(std::string_view text) {
  if (text == "rule") return BackendKind::Rule;
  if (text == "llm") return BackendKind::Llm;
  if (text == "hybrid") return BackendKind::Hybrid;
  return std::nullopt;
}

int cmd_segment(const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    Session session = open_session(config);
    BackendSet backends = make_backends(config);

    FailureList failures;
    std::mutex stats_mutex;
    std::vector<std::pair<Group, double>> sentence_counts;
    std::atomic<std::size_t> skipped{0};
    std::atomic<std::size_t> written{0};

    for_each_document(
        session.corpus.documents.size(), config.concurrency_bound,
        [&](std::size_t i) {
          const Document& doc = session.corpus.documents[i];
          try {
            if (session.store.has_segmentation(doc.doc_id) && !config.force) {
              SegmentationRecord existing =
                  session.store.get_segmentation(doc.doc_id);
              std::scoped_lock lock(stats_mutex);
              sentence_counts.emplace_back(
                  doc.group, static_cast<double>(existing.sentences.size()));
              ++skipped;
              return;
            }
            SentenceSequence sentences = split_sentences(doc.text);
            ChunkSequence chunks =
                chunk_document(doc.text, sentences, *backends.chunker);
            WindowPartition windows =
                partition_windows(doc.text, config.window_size);
            SegmentationRecord record = make_segmentation_record(
                doc.doc_id, sentences, chunks, windows);
            session.store.put_segmentation(record, config.force);
            {
              std::scoped_lock lock(stats_mutex);
              sentence_counts.emplace_back(
                  doc.group, static_cast<double>(sentences.size()));
            }
            ++written;
          } catch (const std::exception& e) {
            failures.add(doc.doc_id, e.what());
          }
        });

    out << "segment: " << written << " written, " << skipped << " skipped, "
        << failures.entries.size() << " failed\n";
    for (const auto& [group, stats] : group_means(sentence_counts)) {
      out << "  " << to_string(group) << " mean sentences: "
          << format_double(stats.first / static_cast<double>(stats.second))
          << " (n=" << stats.second << ")\n";
    }
    return finish(failures, err);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_annotate(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  try {
    Session session = open_session(config);
    BackendSet backends = make_backends(config);
    const std::string annotator_id = annotator_id_of(backends);

    // The prompt builder and docs generation consume the machine-readable
    // schema; refresh it alongside the annotations.
    write_taxonomy_json(config.output_dir / "erm-taxonomy.json");

    FailureList failures;
    std::atomic<std::size_t> skipped{0};
    std::atomic<std::size_t> written{0};
    std::mutex log_mutex;

    for_each_document(
        session.corpus.documents.size(), config.concurrency_bound,
        [&](std::size_t i) {
          const Document& doc = session.corpus.documents[i];
          try {
            if (session.store.has_annotation(doc.doc_id, annotator_id) &&
                !config.force) {
              ++skipped;
              return;
            }
            SegmentationRecord seg_record =
                session.store.get_segmentation(doc.doc_id);
            MaterializedSegmentation seg = materialize(seg_record);
            const bool all_non_argumentative = std::all_of(
                seg.chunks.chunks.begin(), seg.chunks.chunks.end(),
                [](const Chunk& c) {
                  return c.label == ToulminLabel::NonArgumentative;
                });
            if (all_non_argumentative) {
              std::scoped_lock lock(log_mutex);
              out << "  " << doc.doc_id
                  << ": all chunks non-argumentative, chunk pass skipped\n";
            }
            AnnotationVector vec =
                annotate_document(seg.text, seg.sentences, seg.chunks,
                                  *backends.primary, backends.fallback);
            session.store.put_annotation({doc.doc_id, std::move(vec)},
                                         config.force);
            ++written;
          } catch (const std::exception& e) {
            failures.add(doc.doc_id, e.what());
          }
        });

    out << "annotate: " << written << " written, " << skipped << " skipped, "
        << failures.entries.size() << " failed (annotator " << annotator_id
        << ")\n";
    if (backends.rule != nullptr && backends.rule->zero_fill_count() > 0) {
      out << "  note: " << backends.rule->zero_fill_count()
          << " chunk/document unit(s) zero-filled; the rule backend has no "
             "judgement-level coverage\n";
    }
    return finish(failures, err);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_features(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  try {
    Session session = open_session(config);
    BackendSet backends = make_backends(config);
    const std::string annotator_id = annotator_id_of(backends);

    FailureList failures;
    std::mutex rows_mutex;
    std::map<std::string, FeatureRecord> rows;  // doc_id -> record

    for_each_document(
        session.corpus.documents.size(), config.concurrency_bound,
        [&](std::size_t i) {
          const Document& doc = session.corpus.documents[i];
          try {
            SegmentationRecord seg_record =
                session.store.get_segmentation(doc.doc_id);
            MaterializedSegmentation seg = materialize(seg_record);

            AnnotationRecord annotation =
                session.store.has_annotation(doc.doc_id, annotator_id)
                    ? session.store.get_annotation(doc.doc_id, annotator_id)
                    : [&] {
                        auto all = session.store.annotations_for(doc.doc_id);
                        if (all.size() != 1) {
                          throw Error(
                              ErrorCode::NotFound,
                              all.empty()
                                  ? "no annotation record; run annotate first"
                                  : "multiple annotation records; none match "
                                    "annotator '" +
                                        annotator_id + "'");
                        }
                        return all.front();
                      }();

            FeatureRecord record;
            record.doc_id = doc.doc_id;
            record.group = doc.group;
            record.model = doc.model;
            record.annotator_id = annotation.vec.annotator_id;
            record.features = extract_features(annotation.vec, seg.sentences,
                                               seg.chunks, seg.windows);
            if (session.store.has_features(doc.doc_id) && !config.force) {
              // Resumable: keep the stored record, still emit it to the CSV.
              record = session.store.get_features(doc.doc_id);
            } else {
              session.store.put_features(record, config.force);
            }
            std::scoped_lock lock(rows_mutex);
            rows[doc.doc_id] = std::move(record);
          } catch (const std::exception& e) {
            failures.add(doc.doc_id, e.what());
          }
        });

    // CSV in manifest order, one row per successful document.
    std::string csv = features_csv_header() + "\n";
    std::vector<std::pair<Group, double>> delta_values;
    std::vector<std::pair<Group, double>> gamma_values;
    std::vector<std::pair<Group, double>> eta_values;
    for (const Document& doc : session.corpus.documents) {
      auto it = rows.find(doc.doc_id);
      if (it == rows.end()) continue;
      csv += features_csv_row(it->second) + "\n";
      delta_values.emplace_back(doc.group, it->second.features.delta);
      gamma_values.emplace_back(doc.group, it->second.features.gamma);
      if (it->second.features.eta_norm) {
        eta_values.emplace_back(doc.group, *it->second.features.eta_norm);
      }
    }
    write_text_file(config.output_dir / "features.csv", csv);

    out << "features: " << rows.size() << " rows, "
        << failures.entries.size() << " failed\n";
    auto print_means = [&](const char* name,
                           const std::vector<std::pair<Group, double>>& v) {
      out << "  " << name << " group means:";
      for (const auto& [group, stats] : group_means(v)) {
        out << ' ' << to_string(group) << '='
            << format_double(stats.first / static_cast<double>(stats.second));
      }
      out << "\n";
    };
    print_means("delta", delta_values);
    print_means("gamma", gamma_values);
    print_means("eta_norm", eta_values);
    return finish(failures, err);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
}

namespace {

int run_comparison(const RunConfig& config, std::ostream& out,
                   std::ostream& err, bool with_marker_exports) {
  try {
    Session session = open_session(config);

    FailureList failures;
    std::vector<FeatureRecord> features;
    std::map<std::string, std::map<std::string, std::size_t>> counts_by_doc;
    for (const Document& doc : session.corpus.documents) {
      try {
        features.push_back(session.store.get_features(doc.doc_id));
        auto annotations = session.store.annotations_for(doc.doc_id);
        if (annotations.empty()) {
          throw Error(ErrorCode::NotFound, "no annotation record");
        }
        counts_by_doc[doc.doc_id] = marker_counts(annotations.front().vec);
      } catch (const std::exception& e) {
        failures.add(doc.doc_id, e.what());
      }
    }
    if (features.empty()) {
      err << "no feature records; run features first\n";
      return kExitConfig;
    }

    ReportBundle bundle = build_report(features, counts_by_doc);

    const std::filesystem::path reports = config.output_dir / "reports";
    std::filesystem::create_directories(reports);
    write_text_file(reports / "comparison.csv",
                    comparison_csv(bundle.comparison));
    write_text_file(reports / "comparison.md", comparison_markdown(bundle));
    write_text_file(reports / "level3.csv", level3_csv(bundle.level3));
    write_text_file(reports / "models.csv", models_csv(bundle.panel));
    write_text_file(reports / "scatter.csv", scatter_csv(features));
    write_text_file(reports / "metric_values.csv",
                    metric_values_csv(features));
    if (with_marker_exports) {
      write_text_file(reports / "device_counts.csv",
                      device_counts_csv(features, counts_by_doc));
      write_text_file(reports / "device_means.md",
                      device_means_markdown(features, counts_by_doc));
    }

    out << (with_marker_exports ? "report" : "compare") << ": "
        << bundle.comparison.rows.size() << " pairwise rows, "
        << bundle.level3.size() << " proportion rows -> "
        << reports.string() << "\n";
    for (const std::string& notice : bundle.notices) {
      out << "  notice: " << notice << "\n";
    }
    for (const ComparisonRow& row : bundle.comparison.rows) {
      if (!row.note.empty()) {
        out << "  " << row.metric << " " << row.group_a << "-" << row.group_b
            << ": " << row.note << "\n";
      }
    }
    return finish(failures, err);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int cmd_compare(const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  return run_comparison(config, out, err, /*with_marker_exports=*/false);
}

int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return run_comparison(config, out, err, /*with_marker_exports=*/true);
}

}  // namespace erm
