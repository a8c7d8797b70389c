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

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "erm/corpus.hpp"
#include "erm/json_io.hpp"
#include "mock_llm_server.hpp"

using namespace erm;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtureDir = ERM_FIXTURE_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("erm-pipe-" + tag + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig fixture_config(const fs::path& out) {
  RunConfig config;
  config.manifest_path = kFixtureDir / "manifest.jsonl";
  config.output_dir = out;
  config.backend = BackendKind::Rule;
  return config;
}

int run(int (*cmd)(const RunConfig&, std::ostream&, std::ostream&),
        const RunConfig& config, std::string* log = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cmd(config, out, err);
  if (log != nullptr) *log = out.str() + err.str();
  return code;
}

int run_full(const RunConfig& config) {
  int code = run(cmd_segment, config);
  if (code != kExitOk) return code;
  code = run(cmd_annotate, config);
  if (code != kExitOk) return code;
  code = run(cmd_features, config);
  if (code != kExitOk) return code;
  return run(cmd_compare, config);
}

std::size_t count_files(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    (void)entry;
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("segment writes one record per fixture document") {
  TempDir dir("segment");
  RunConfig config = fixture_config(dir.path / "out");
  std::string log;
  CHECK(run(cmd_segment, config, &log) == kExitOk);
  CHECK(count_files(dir.path / "out" / "segmentations") == 9);
  CHECK(log.find("9 written") != std::string::npos);
  CHECK(log.find("HE mean sentences") != std::string::npos);

  SUBCASE("rerun without force skips; with force rewrites identically") {
    Store store(dir.path / "out");
    store.initialize();
    const std::string before =
        read_text_file(dir.path / "out" / "segmentations" / "he-001.json");
    std::string rerun_log;
    CHECK(run(cmd_segment, config, &rerun_log) == kExitOk);
    CHECK(rerun_log.find("0 written, 9 skipped") != std::string::npos);

    config.force = true;
    CHECK(run(cmd_segment, config) == kExitOk);
    const std::string after =
        read_text_file(dir.path / "out" / "segmentations" / "he-001.json");
    CHECK(before == after);
  }
}

TEST_CASE("segment window-size override changes the persisted partition") {
  TempDir dir("window");
  RunConfig config = fixture_config(dir.path / "out");
  config.window_size = 25;
  CHECK(run(cmd_segment, config) == kExitOk);
  Store store(dir.path / "out");
  store.initialize();
  SegmentationRecord wide = store.get_segmentation("he-001");

  TempDir dir50("window50");
  RunConfig config50 = fixture_config(dir50.path / "out");
  CHECK(run(cmd_segment, config50) == kExitOk);
  Store store50(dir50.path / "out");
  store50.initialize();
  SegmentationRecord base = store50.get_segmentation("he-001");

  CHECK(wide.windows.size() > base.windows.size());
}

TEST_CASE("missing manifest or text file is a configuration error") {
  TempDir dir("bad-manifest");
  RunConfig config = fixture_config(dir.path / "out");
  config.manifest_path = dir.path / "missing.jsonl";
  std::string log;
  CHECK(run(cmd_segment, config, &log) == kExitConfig);

  write_text_file(dir.path / "manifest.jsonl",
                  R"({"doc_id":"x","group":"HE","path":"gone.txt"})" "\n");
  config.manifest_path = dir.path / "manifest.jsonl";
  CHECK(run(cmd_segment, config, &log) == kExitConfig);
}

TEST_CASE("annotate requires segmentations and is deterministic") {
  TempDir dir("annotate");
  RunConfig config = fixture_config(dir.path / "out");

  // Without segmentation records every document fails: partial exit.
  std::string log;
  CHECK(run(cmd_annotate, config, &log) == kExitPartial);
  CHECK(log.find("9 document(s) failed") != std::string::npos);

  REQUIRE(run(cmd_segment, config) == kExitOk);
  CHECK(run(cmd_annotate, config, &log) == kExitOk);
  CHECK(count_files(dir.path / "out" / "annotations") == 9);
  CHECK(fs::exists(dir.path / "out" / "erm-taxonomy.json"));

  const fs::path record_path =
      dir.path / "out" / "annotations" / "hn-001__rule-1.json";
  REQUIRE(fs::exists(record_path));
  const std::string first = read_text_file(record_path);
  config.force = true;
  CHECK(run(cmd_annotate, config) == kExitOk);
  CHECK(read_text_file(record_path) == first);

  // The all-plain fixture document annotates to all zeros.
  Store store(dir.path / "out");
  store.initialize();
  AnnotationRecord zero = store.get_annotation("hn-001", "rule-1");
  CHECK(zero.vec.l1a.sum() + zero.vec.l1b.sum() + zero.vec.l1c.sum() +
            zero.vec.l2a.sum() + zero.vec.l2b.sum() + zero.vec.l3.sum() ==
        0);
}

TEST_CASE("llm-backed run without configuration fails fast with exit 2") {
  ::unsetenv("ERM_LLM_BASE_URL");
  ::unsetenv("ERM_LLM_API_KEY");
  ::unsetenv("ERM_LLM_MODEL");
  TempDir dir("llm-config");
  RunConfig config = fixture_config(dir.path / "out");
  config.backend = BackendKind::Llm;
  std::string log;
  CHECK(run(cmd_annotate, config, &log) == kExitConfig);
  CHECK(log.find("ERM_LLM") != std::string::npos);
}

TEST_CASE("features: all-zero document yields delta 0 and null eta_norm") {
  TempDir dir("features");
  RunConfig config = fixture_config(dir.path / "out");
  REQUIRE(run(cmd_segment, config) == kExitOk);
  REQUIRE(run(cmd_annotate, config) == kExitOk);
  std::string log;
  CHECK(run(cmd_features, config, &log) == kExitOk);
  CHECK(log.find("9 rows") != std::string::npos);

  Store store(dir.path / "out");
  store.initialize();
  FeatureRecord zero = store.get_features("hn-001");
  CHECK(zero.features.delta == 0.0);
  CHECK(zero.features.gamma == 0.0);
  CHECK_FALSE(zero.features.eta_norm.has_value());

  // The CSV mirrors the stored records, manifest order, null as empty.
  const std::string csv = read_text_file(dir.path / "out" / "features.csv");
  CHECK(csv.rfind("doc_id,group,model,", 0) == 0);
  CHECK(csv.find("\nhn-001,HN,,0,0,,0,0,0,0,") != std::string::npos);
  std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 10);  // header + 9 documents

  // Documents with devices have defined entropy in [0, 1].
  FeatureRecord he = store.get_features("he-001");
  REQUIRE(he.features.eta_norm.has_value());
  CHECK(*he.features.eta_norm >= 0.0);
  CHECK(*he.features.eta_norm <= 1.0);
  CHECK(he.features.densities.rho > 0.0);
}

TEST_CASE("features without annotations lists failures with partial exit") {
  TempDir dir("features-missing");
  RunConfig config = fixture_config(dir.path / "out");
  REQUIRE(run(cmd_segment, config) == kExitOk);
  std::string log;
  CHECK(run(cmd_features, config, &log) == kExitPartial);
  CHECK(log.find("no annotation record") != std::string::npos);
}

TEST_CASE("compare emits the report file set") {
  TempDir dir("compare");
  RunConfig config = fixture_config(dir.path / "out");
  REQUIRE(run_full(config) == kExitOk);

  const fs::path reports = dir.path / "out" / "reports";
  for (const char* name :
       {"comparison.csv", "comparison.md", "level3.csv", "models.csv",
        "scatter.csv", "metric_values.csv"}) {
    CHECK(fs::exists(reports / name));
  }
  // compare does not write the raw marker exports; report does.
  CHECK_FALSE(fs::exists(reports / "device_counts.csv"));
  CHECK(run(cmd_report, config) == kExitOk);
  CHECK(fs::exists(reports / "device_counts.csv"));
  CHECK(fs::exists(reports / "device_means.md"));

  const std::string md = read_text_file(reports / "comparison.md");
  CHECK(md.find("| tricolon |") != std::string::npos);
  CHECK(md.find("HE vs LG") != std::string::npos);

  const std::string csv = read_text_file(reports / "comparison.csv");
  CHECK(csv.find("delta,HE,HN") != std::string::npos);
  CHECK(csv.find("delta,HE,LG") != std::string::npos);
  CHECK(csv.find("delta,HN,LG") != std::string::npos);
}

TEST_CASE("end-to-end determinism: two clean rule-backend runs are "
          "byte-identical") {
  TempDir dir_a("det-a");
  TempDir dir_b("det-b");
  RunConfig config_a = fixture_config(dir_a.path / "out");
  RunConfig config_b = fixture_config(dir_b.path / "out");
  REQUIRE(run_full(config_a) == kExitOk);
  REQUIRE(run_full(config_b) == kExitOk);

  for (const char* relative :
       {"features.csv", "reports/comparison.csv", "reports/comparison.md",
        "reports/level3.csv", "reports/models.csv", "reports/scatter.csv",
        "reports/metric_values.csv", "erm-taxonomy.json"}) {
    CHECK(read_text_file(dir_a.path / "out" / relative) ==
          read_text_file(dir_b.path / "out" / relative));
  }
  // Per-document records as well.
  Store store_a(dir_a.path / "out");
  Store store_b(dir_b.path / "out");
  store_a.initialize();
  store_b.initialize();
  Corpus corpus = load_manifest(kFixtureDir / "manifest.jsonl");
  for (const Document& doc : corpus.documents) {
    CHECK(canonical_dump(to_json(store_a.get_segmentation(doc.doc_id))) ==
          canonical_dump(to_json(store_b.get_segmentation(doc.doc_id))));
    CHECK(canonical_dump(to_json(store_a.get_features(doc.doc_id))) ==
          canonical_dump(to_json(store_b.get_features(doc.doc_id))));
  }
}

TEST_CASE("parallel annotation matches the sequential records") {
  TempDir sequential("seq");
  TempDir parallel("par");
  RunConfig config_seq = fixture_config(sequential.path / "out");
  RunConfig config_par = fixture_config(parallel.path / "out");
  config_par.concurrency_bound = 4;
  REQUIRE(run_full(config_seq) == kExitOk);
  REQUIRE(run_full(config_par) == kExitOk);
  CHECK(read_text_file(sequential.path / "out" / "features.csv") ==
        read_text_file(parallel.path / "out" / "features.csv"));
}

TEST_CASE("LG-only corpus: panel only, comparison skipped with notice") {
  TempDir dir("lg-only");
  std::string manifest;
  for (const char* doc : {"lg-001", "lg-002", "lg-003"}) {
    manifest += std::string(R"({"doc_id":")") + doc +
                R"(","group":"LG","model":")" +
                (std::string(doc) == "lg-003" ? "model-b" : "model-a") +
                R"(","path":")" + (kFixtureDir / "corpus" / doc).string() +
                R"(.txt"})" + "\n";
  }
  write_text_file(dir.path / "manifest.jsonl", manifest);

  RunConfig config = fixture_config(dir.path / "out");
  config.manifest_path = dir.path / "manifest.jsonl";
  REQUIRE(run(cmd_segment, config) == kExitOk);
  REQUIRE(run(cmd_annotate, config) == kExitOk);
  REQUIRE(run(cmd_features, config) == kExitOk);
  std::string log;
  CHECK(run(cmd_compare, config, &log) == kExitOk);
  CHECK(log.find("group comparison skipped") != std::string::npos);
  const std::string csv =
      read_text_file(dir.path / "out" / "reports" / "comparison.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);  // header only
}

TEST_CASE("compare with a missing feature record: partial exit, report "
          "still written") {
  TempDir dir("compare-partial");
  RunConfig config = fixture_config(dir.path / "out");
  REQUIRE(run_full(config) == kExitOk);
  fs::remove(dir.path / "out" / "features" / "hn-002.json");

  std::string log;
  CHECK(run(cmd_compare, config, &log) == kExitPartial);
  CHECK(log.find("hn-002") != std::string::npos);
  // The remaining eight documents still produce a comparison.
  const std::string csv =
      read_text_file(dir.path / "out" / "reports" / "comparison.csv");
  CHECK(csv.find("delta,HE,LG") != std::string::npos);
}

TEST_CASE("hybrid backend: rule sentence passes, LLM judgement passes") {
  erm::testing::MockServer server;
  server.reply = erm::testing::pass_aware_reply;

  TempDir dir("hybrid");
  // Single-document manifest keeps the request volume small.
  write_text_file(dir.path / "manifest.jsonl",
                  std::string(R"({"doc_id":"he-001","group":"HE","path":")") +
                      (kFixtureDir / "corpus" / "he-001.txt").string() +
                      R"("})" + "\n");
  RunConfig config = fixture_config(dir.path / "out");
  config.manifest_path = dir.path / "manifest.jsonl";
  config.backend = BackendKind::Hybrid;
  config.llm = server.config();

  std::string log;
  REQUIRE(run(cmd_segment, config, &log) == kExitOk);
  Store store(dir.path / "out");
  store.initialize();
  // The LLM chunker proposed one covering chunk.
  SegmentationRecord seg = store.get_segmentation("he-001");
  REQUIRE(seg.chunks.size() == 1);
  CHECK(seg.chunks[0].label == "Claim");

  REQUIRE(run(cmd_annotate, config, &log) == kExitOk);
  AnnotationRecord ann =
      store.get_annotation("he-001", "rule-1+llm:mock-model");
  // Sentence passes came from rules: tricolons detected, chiasmus stays 0
  // (the LLM handles it only in pure-llm mode). Judgement-level rows came
  // from the mock (enumeratio, structure bits).
  CHECK(ann.vec.l1a.column_sum(0) > 0);
  CHECK(ann.vec.l1a.column_sum(2) == 0);
  CHECK(ann.vec.l1b.at(0, 1) == 1);
  CHECK(ann.vec.l3.at(0, 0) == 1);
  CHECK(ann.vec.l3.at(0, 3) == 1);

  REQUIRE(run(cmd_features, config, &log) == kExitOk);
  FeatureRecord features = store.get_features("he-001");
  CHECK(features.features.alpha == 1);
  CHECK(features.features.varsigma == 1);
  CHECK(features.annotator_id == "rule-1+llm:mock-model");
}

TEST_CASE("fixture group means point in the expected directions") {
  TempDir dir("direction");
  RunConfig config = fixture_config(dir.path / "out");
  REQUIRE(run_full(config) == kExitOk);

  Store store(dir.path / "out");
  store.initialize();
  Corpus corpus = load_manifest(kFixtureDir / "manifest.jsonl");
  double he_eps_p = 0.0, lg_eps_p = 0.0, he_eps_g = 0.0, lg_eps_g = 0.0;
  for (const Document& doc : corpus.documents) {
    FeatureRecord record = store.get_features(doc.doc_id);
    if (doc.group == Group::HE) {
      he_eps_p += record.features.densities.eps_p;
      he_eps_g += record.features.densities.eps_g;
    } else if (doc.group == Group::LG) {
      lg_eps_p += record.features.densities.eps_p;
      lg_eps_g += record.features.densities.eps_g;
    }
  }
  // The synthetic corpus mirrors the expected contrasts: generated texts
  // carry more performed hesitancy, expert texts more genuine grounding.
  CHECK(lg_eps_p > he_eps_p);
  CHECK(he_eps_g > lg_eps_g);
}
