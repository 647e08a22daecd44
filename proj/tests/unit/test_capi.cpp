#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "pgjr/pgjr.h"

namespace fs = std::filesystem;

namespace {

struct Blobs {
  std::vector<int32_t> labels;
  std::vector<float> data;
};

// Three clusters on the first three axes of a 16-dim space with small
// deterministic jitter; no engine code involved.
Blobs make_blobs(uint32_t n, uint32_t dim) {
  Blobs b;
  uint64_t s = 88172645463325252ull;
  for (uint32_t i = 0; i < n; ++i) {
    b.labels.push_back(static_cast<int32_t>(i % 3));
    for (uint32_t t = 0; t < dim; ++t) {
      s ^= s << 13;
      s ^= s >> 7;
      s ^= s << 17;
      const double jitter = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
      b.data.push_back(static_cast<float>((t == i % 3 ? 8.0 : 0.0) + 0.3 * jitter));
    }
  }
  return b;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pgjr_string_free(s);
  return out;
}

const char* kConfig =
    R"({"block": 2, "grid": 4, "n_out": 8, "batch_size": 16, "epochs": 4, "lr1_epoch": 2,
        "k": 3, "eval_every": 2, "restarts": 3, "eval_restarts": 2})";

}  // namespace

TEST_CASE("version and null frees") {
  CHECK(std::strlen(pgjr_version()) > 0);
  pgjr_embeddings_free(nullptr);
  pgjr_config_free(nullptr);
  pgjr_checkpoint_free(nullptr);
  pgjr_string_free(nullptr);
}

TEST_CASE("status codes") {
  pgjr_embeddings* e = nullptr;
  CHECK(pgjr_embeddings_load("/nonexistent/x.emb", &e) == PGJR_ERR_DATA);
  CHECK(e == nullptr);
  CHECK(std::strlen(pgjr_last_error()) > 0);

  pgjr_config* cfg = nullptr;
  CHECK(pgjr_config_parse(R"({"bogus": 1})", &cfg) == PGJR_ERR_USAGE);
  CHECK(std::string(pgjr_last_error()).find("bogus") != std::string::npos);
  CHECK(pgjr_config_parse(nullptr, nullptr) == PGJR_ERR_USAGE);

  char* table = nullptr;
  CHECK(pgjr_gradcheck(5, 0, 1e-4, "gjr", &table) == PGJR_ERR_GRADCHECK);
  CHECK(take(table).find("FAIL") != std::string::npos);
  CHECK(pgjr_gradcheck(5, 0, 1e-4, nullptr, &table) == PGJR_OK);
  CHECK(take(table).find("PASS") != std::string::npos);
  CHECK(pgjr_gradcheck(5, 0, 1e-4, "bogus", &table) == PGJR_ERR_USAGE);
}

TEST_CASE("end to end through the C interface") {
  const fs::path dir = fs::temp_directory_path() / ("pgjr_capi_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const Blobs b = make_blobs(60, 16);

  pgjr_embeddings* e = nullptr;
  REQUIRE(pgjr_embeddings_create(60, 1, 16, b.labels.data(), b.data.data(), &e) == PGJR_OK);
  uint32_t n = 0, views = 0, dim = 0;
  int has_labels = 0;
  REQUIRE(pgjr_embeddings_info(e, &n, &views, &dim, &has_labels) == PGJR_OK);
  CHECK(n == 60);
  CHECK(views == 1);
  CHECK(dim == 16);
  CHECK(has_labels == 1);
  const std::string emb = (dir / "d.emb").string();
  CHECK(pgjr_embeddings_save(e, emb.c_str()) == PGJR_OK);

  pgjr_config* cfg = nullptr;
  REQUIRE(pgjr_config_parse(kConfig, &cfg) == PGJR_OK);
  char* cfg_json = nullptr;
  REQUIRE(pgjr_config_to_json(cfg, &cfg_json) == PGJR_OK);
  CHECK(take(cfg_json).find("\"tau2\"") != std::string::npos);

  pgjr_checkpoint* ckpt = nullptr;
  char* report = nullptr;
  const std::string out = (dir / "run").string();
  REQUIRE(pgjr_train(cfg, e, nullptr, out.c_str(), &ckpt, &report) == PGJR_OK);
  CHECK(take(report).find("\"losses\"") != std::string::npos);
  CHECK(fs::exists(dir / "run" / "checkpoint.bin"));
  uint32_t epoch = 0;
  CHECK(pgjr_checkpoint_epoch(ckpt, &epoch) == PGJR_OK);
  CHECK(epoch == 4);

  pgjr_checkpoint* loaded = nullptr;
  REQUIRE(pgjr_checkpoint_load((dir / "run" / "checkpoint.bin").c_str(), &loaded) == PGJR_OK);
  char* ev = nullptr;
  REQUIRE(pgjr_evaluate(loaded, e, &ev) == PGJR_OK);
  CHECK(take(ev).find("\"acc\"") != std::string::npos);

  CHECK(pgjr_export_projection(loaded, e, (dir / "p.csv").c_str()) == PGJR_OK);
  CHECK(pgjr_knn_report(loaded, e, 3, (dir / "k.json").c_str()) == PGJR_OK);
  CHECK(pgjr_knn_report(loaded, e, 0, (dir / "k0.json").c_str()) == PGJR_ERR_USAGE);
  CHECK(pgjr_export_projection(loaded, e, "/nonexistent/dir/p.csv") == PGJR_ERR_DATA);

  char* raw = nullptr;
  REQUIRE(pgjr_kmeans_raw(e, 3, 5, 1, 0, &raw) == PGJR_OK);
  CHECK(take(raw).find("\"acc\": 1.0") != std::string::npos);
  CHECK(pgjr_kmeans_raw(e, 100, 5, 1, 0, &raw) == PGJR_ERR_USAGE);

  pgjr_config* bad_dims = nullptr;
  REQUIRE(pgjr_config_parse(R"({"block": 3, "grid": 4, "k": 3, "batch_size": 16})", &bad_dims) ==
          PGJR_OK);
  CHECK(pgjr_train(bad_dims, e, nullptr, nullptr, nullptr, nullptr) == PGJR_ERR_USAGE);

  pgjr_config* diverge = nullptr;
  REQUIRE(pgjr_config_parse(
              R"({"block": 2, "grid": 4, "k": 3, "batch_size": 16, "epochs": 2, "lr1_epoch": 1,
                  "lr0": 1e200, "momentum": 0.0})",
              &diverge) == PGJR_OK);
  CHECK(pgjr_train(diverge, e, nullptr, nullptr, nullptr, nullptr) == PGJR_ERR_NUMERICAL);

  CHECK(pgjr_set_threads(2) == PGJR_OK);
  CHECK(pgjr_set_threads(0) == PGJR_OK);

  pgjr_config_free(diverge);
  pgjr_config_free(bad_dims);
  pgjr_checkpoint_free(loaded);
  pgjr_checkpoint_free(ckpt);
  pgjr_config_free(cfg);
  pgjr_embeddings_free(e);
  fs::remove_all(dir);
}
