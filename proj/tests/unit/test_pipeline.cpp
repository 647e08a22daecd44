#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "pgjr/error.hpp"
#include "pgjr/numerics/parallel.hpp"
#include "pgjr/pipeline/binary_io.hpp"
#include "pgjr/pipeline/checkpoint.hpp"
#include "pgjr/pipeline/config.hpp"
#include "pgjr/pipeline/embeddings.hpp"
#include "pgjr/pipeline/evaluate.hpp"
#include "pgjr/pipeline/gradcheck.hpp"
#include "pgjr/pipeline/trainer.hpp"

namespace fs = std::filesystem;
using namespace pgjr;
using pgjr::testing::BlobSpec;
using pgjr::testing::gaussian_blobs;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("pgjr_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EmbeddingSet small_blobs(std::size_t views = 1) {
  BlobSpec blobs;
  blobs.per_cluster = 20;
  blobs.dim = 16;
  blobs.views = views;
  blobs.seed = 5;
  return gaussian_blobs(blobs);
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.blocks = 2;
  cfg.grid = 4;
  cfg.n_out = 8;
  cfg.batch_size = 16;
  cfg.epochs = 6;
  cfg.lr1_epoch = 4;
  cfg.k = 3;
  cfg.eval_every = 2;
  cfg.restarts = 4;
  cfg.eval_restarts = 2;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_SUITE("embeddings") {
  TEST_CASE("round trip is byte exact") {
    TempDir dir;
    const EmbeddingSet set = small_blobs(2);
    write_embeddings(set, dir / "a.emb");
    const EmbeddingSet back = load_embeddings(dir / "a.emb");
    write_embeddings(back, dir / "b.emb");
    CHECK(slurp(dir / "a.emb") == slurp(dir / "b.emb"));
    CHECK(back.n == set.n);
    CHECK(back.views == 2);
    CHECK(back.labels == set.labels);
    CHECK(back.data == set.data);
  }

  TEST_CASE("header layout") {
    EmbeddingSet set;
    set.n = 1;
    set.views = 1;
    set.dim = 4;
    set.labels = {-1};
    set.data = {1.0f, 2.0f, 3.0f, 4.0f};
    const std::vector<char> b = serialize_embeddings(set);
    REQUIRE(b.size() == 8 + 4 * 4 + 4 + 16);
    CHECK(std::string(b.data(), 8) == "PGJREMB1");
    io::Reader r(b, "t");
    (void)r.bytes(8);
    CHECK(r.u32() == 1);
    CHECK(r.u32() == 1);
    CHECK(r.u32() == 1);
    CHECK(r.u32() == 4);
    CHECK(r.i32() == -1);
    CHECK(r.f32() == 1.0f);
    const EmbeddingSet back = parse_embeddings(b);
    CHECK_FALSE(back.has_labels());
  }

  TEST_CASE("distinct format errors") {
    const std::vector<char> good = serialize_embeddings(small_blobs());
    std::vector<char> bad = good;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(parse_embeddings(bad), doctest::Contains("bad magic"), DataFormatError);

    std::vector<char> cut(good.begin(), good.end() - 3);
    CHECK_THROWS_WITH_AS(parse_embeddings(cut), doctest::Contains("truncated"), DataFormatError);

    std::vector<char> extra = good;
    extra.push_back(0);
    CHECK_THROWS_WITH_AS(parse_embeddings(extra), doctest::Contains("trailing"), DataFormatError);

    std::vector<char> version = good;
    version[8] = 2;
    CHECK_THROWS_WITH_AS(parse_embeddings(version), doctest::Contains("version"), DataFormatError);

    EmbeddingSet nan = small_blobs();
    nan.data[7] = std::nanf("");
    CHECK_THROWS_WITH_AS(parse_embeddings(serialize_embeddings(nan)), doctest::Contains("non-finite"),
                         DataFormatError);

    EmbeddingSet short_labels = small_blobs();
    short_labels.labels.pop_back();
    CHECK_THROWS_AS(short_labels.validate(), DataFormatError);

    CHECK_THROWS_AS(load_embeddings("/nonexistent/dir/file.emb"), DataFormatError);
  }

  TEST_CASE("huge header counts are reported as truncation") {
    io::Writer w;
    w.bytes("PGJREMB1");
    w.u32(1);
    w.u32(0xffffffffu);
    w.u32(0xffffffffu);
    w.u32(0xffffffffu);
    CHECK_THROWS_AS(parse_embeddings(w.data()), DataFormatError);
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const TrainConfig cfg = parse_config("{}");
    CHECK(cfg.tau1 == 1.0);
    CHECK(cfg.tau2 == 2.0);
    CHECK(cfg.batch_size == 128);
    CHECK(cfg.n_out == 128);
    CHECK(cfg.blocks == 8);
    CHECK(cfg.grid == 4);
    CHECK(cfg.lr0 == 0.5);
    CHECK(cfg.lr1 == 0.01);
    CHECK(cfg.lr1_epoch == 75);
    CHECK(cfg.epochs == 150);
    CHECK(cfg.bank_momentum == 0.5);
    CHECK(cfg.restarts == 20);
    CHECK(cfg.eval_restarts == 5);
    CHECK(cfg.eval_every == 10);
    CHECK(cfg.loss_reduction == LossReduction::Mean);
    CHECK(cfg == TrainConfig{});
  }

  TEST_CASE("round trip through JSON") {
    TrainConfig cfg = small_config();
    cfg.head = HeadKind::Linear;
    cfg.gjr_init = GjrInit::Zero;
    cfg.loss_reduction = LossReduction::Sum;
    CHECK(config_from_json(config_to_json(cfg)) == cfg);
  }

  TEST_CASE("unknown keys and wrong types") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"tau_1": 1.0})"), doctest::Contains("tau_1"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"epochs": "ten"})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"head": "mlp"})"), UsageError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), UsageError);
    CHECK_THROWS_AS(parse_config("{not json"), UsageError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(parse_config(R"({"k": 1})"), UsageError);
    TrainConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate_for(60, 16));
    CHECK_THROWS_AS(cfg.validate_for(10, 16), UsageError);
    CHECK_THROWS_AS(cfg.validate_for(60, 18), UsageError);
  }

  TEST_CASE("learning-rate schedule") {
    const TrainConfig cfg = small_config();
    CHECK(cfg.learning_rate(0) == cfg.lr0);
    CHECK(cfg.learning_rate(3) == cfg.lr0);
    CHECK(cfg.learning_rate(4) == cfg.lr1);
  }

  TEST_CASE("hash ignores the epoch horizon only") {
    TrainConfig a = small_config(), b = a;
    b.epochs = 100;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 12;
    CHECK(config_hash(a) != config_hash(b));
  }
}

TEST_SUITE("training") {
  TEST_CASE("zero epochs keeps the initialisation") {
    TrainConfig cfg = small_config();
    cfg.epochs = 0;
    cfg.lr1_epoch = 0;
    const EmbeddingSet data = small_blobs();
    const TrainResult r = train(cfg, data);
    CHECK(r.report.losses.empty());
    CHECK(r.report.evals.empty());
    CHECK_FALSE(r.report.final_cluster.has_value());
    CHECK(r.checkpoint.epoch == 0);
    const Checkpoint init = initial_checkpoint(cfg, data);
    CHECK(r.checkpoint.head.projection.weight == init.head.projection.weight);
    CHECK(r.checkpoint.bank.entries() == init.bank.entries());
  }

  TEST_CASE("report shape follows the schedule") {
    const TrainConfig cfg = small_config();
    const TrainResult r = train(cfg, small_blobs());
    REQUIRE(r.report.losses.size() == 6);
    CHECK(r.report.evals.size() == 3);
    CHECK(r.report.epoch_seconds.size() == 6);
    CHECK(r.report.losses[3].lr == cfg.lr0);
    CHECK(r.report.losses[4].lr == cfg.lr1);
    // 60 samples in batches of 16: 16, 16, 16, 12.
    CHECK(r.report.losses[0].batches == 4);
    for (const auto& l : r.report.losses) CHECK(std::isfinite(l.total));
    REQUIRE(r.report.final_cluster.has_value());
    CHECK(r.report.final_cluster->restarts_run == cfg.restarts);
    CHECK(r.report.final_metrics.acc.has_value());
  }

  TEST_CASE("trailing singleton batch is skipped") {
    TrainConfig cfg = small_config();
    cfg.batch_size = 59;
    cfg.epochs = 1;
    cfg.lr1_epoch = 0;
    const TrainResult r = train(cfg, small_blobs());
    CHECK(r.report.losses[0].batches == 1);
  }

  TEST_CASE("identical seeds give identical runs") {
    const TrainConfig cfg = small_config();
    const EmbeddingSet data = small_blobs(2);
    const TrainResult a = train(cfg, data), b = train(cfg, data);
    CHECK(report_to_json(a.report, cfg) == report_to_json(b.report, cfg));
    CHECK(serialize_checkpoint(a.checkpoint) == serialize_checkpoint(b.checkpoint));
  }

  TEST_CASE("resume equals an uninterrupted run") {
    TrainConfig full = small_config();
    const EmbeddingSet data = small_blobs(3);
    const TrainResult whole = train(full, data);

    TrainConfig first = full;
    first.epochs = 3;
    const TrainResult part = train(first, data);
    // Round trip through bytes as the CLI would.
    const Checkpoint restored = parse_checkpoint(serialize_checkpoint(part.checkpoint));
    const TrainResult rest = train(full, data, &restored);

    CHECK(serialize_checkpoint(rest.checkpoint) == serialize_checkpoint(whole.checkpoint));
    REQUIRE(rest.report.losses.size() == 3);
    for (std::size_t e = 0; e < 3; ++e) {
      CHECK(rest.report.losses[e].total == whole.report.losses[e + 3].total);
      CHECK(part.report.losses[e].total == whole.report.losses[e].total);
    }
  }

  TEST_CASE("resume rejects a different config") {
    const TrainConfig cfg = small_config();
    const EmbeddingSet data = small_blobs();
    TrainConfig other = cfg;
    other.epochs = 2;
    const TrainResult part = train(other, data);
    TrainConfig changed = cfg;
    changed.lr0 = 0.1;
    CHECK_THROWS_AS(train(changed, data, &part.checkpoint), UsageError);
  }

  TEST_CASE("frozen zero branch matches the linear head bitwise") {
    TrainConfig pg = small_config();
    pg.gjr_init = GjrInit::Zero;
    pg.freeze_gjr = true;
    TrainConfig lin = small_config();
    lin.head = HeadKind::Linear;
    const EmbeddingSet data = small_blobs(2);
    const TrainResult a = train(pg, data), b = train(lin, data);
    REQUIRE(a.report.losses.size() == b.report.losses.size());
    for (std::size_t e = 0; e < a.report.losses.size(); ++e) {
      CHECK(a.report.losses[e].instance == b.report.losses[e].instance);
      CHECK(a.report.losses[e].decorrelation == b.report.losses[e].decorrelation);
    }
    CHECK(a.checkpoint.head.projection.weight == b.checkpoint.head.projection.weight);
    CHECK(a.checkpoint.head.projection.bias == b.checkpoint.head.projection.bias);
    CHECK(a.checkpoint.bank.entries() == b.checkpoint.bank.entries());
    CHECK(a.report.final_cluster->assignments == b.report.final_cluster->assignments);
  }

  TEST_CASE("evaluation of the zero branch equals the linear baseline") {
    TrainConfig pg = small_config();
    pg.gjr_init = GjrInit::Zero;
    pg.epochs = 0;
    pg.lr1_epoch = 0;
    TrainConfig lin = pg;
    lin.head = HeadKind::Linear;
    const EmbeddingSet data = small_blobs();
    const Evaluation a = evaluate(initial_checkpoint(pg, data), data);
    const Evaluation b = evaluate(initial_checkpoint(lin, data), data);
    CHECK(a.cluster.assignments == b.cluster.assignments);
    CHECK(a.cluster.inertia == b.cluster.inertia);
  }

  TEST_CASE("divergence is reported with its location") {
    TrainConfig cfg = small_config();
    cfg.lr0 = 1e200;
    cfg.momentum = 0.0;
    try {
      (void)train(cfg, small_blobs());
      FAIL("no throw");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("epoch") != std::string::npos);
      CHECK(std::string(e.what()).find("batch") != std::string::npos);
    }
  }

  TEST_CASE("unlabelled data trains without label metrics") {
    EmbeddingSet data = small_blobs();
    std::fill(data.labels.begin(), data.labels.end(), -1);
    const TrainResult r = train(small_config(), data);
    CHECK(r.report.evals.empty());
    CHECK_FALSE(r.report.final_metrics.acc.has_value());
    CHECK(r.report.final_metrics.silhouette.has_value());
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("round trip") {
    TempDir dir;
    const TrainResult r = train(small_config(), small_blobs());
    save_checkpoint(r.checkpoint, dir / "c.bin");
    const Checkpoint back = load_checkpoint(dir / "c.bin");
    CHECK(serialize_checkpoint(back) == serialize_checkpoint(r.checkpoint));
    CHECK(back.config == r.checkpoint.config);
    CHECK(back.head.projection.weight == r.checkpoint.head.projection.weight);
  }

  TEST_CASE("corruption is detected") {
    const TrainResult r = train(small_config(), small_blobs());
    std::vector<char> b = serialize_checkpoint(r.checkpoint);
    std::vector<char> magic = b;
    magic[1] = 'Q';
    CHECK_THROWS_AS(parse_checkpoint(magic), DataFormatError);
    std::vector<char> cut(b.begin(), b.begin() + static_cast<long>(b.size() / 2));
    CHECK_THROWS_AS(parse_checkpoint(cut), DataFormatError);
  }
}

TEST_SUITE("outputs") {
  TEST_CASE("run directory contents") {
    TempDir dir;
    const TrainConfig cfg = small_config();
    const TrainResult r = train(cfg, small_blobs());
    write_run_outputs(r, dir.path.string());
    for (const char* f : {"report.json", "losses.csv", "timing.json", "checkpoint.bin"})
      CHECK(fs::exists(dir.path / f));
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["losses"].size() == 6);
    CHECK(report["evals"].size() == 3);
    CHECK(report["final"]["assignments"].size() == 60);
    CHECK(report.contains("config"));
    const std::string csv = slurp(dir / "losses.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  }

  TEST_CASE("projection csv for three samples") {
    ClusterResult c;
    c.assignments = {0, 1, 0};
    const Matrix reps{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    const std::vector<std::int32_t> labels{2, -1, 0};
    const std::string csv = projection_csv(reps, c, labels);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.rfind("sample_index,proj_x,proj_y,cluster_id,true_label\n", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
    CHECK(csv.substr(csv.size() - 5) == ",0,0\n");
  }

  TEST_CASE("identical representations project to the origin") {
    ClusterResult c;
    c.assignments = {0, 0, 1, 1};
    const std::vector<std::int32_t> labels{0, 0, 1, 1};
    const std::string csv = projection_csv(Matrix(4, 3, 0.5), c, labels);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) CHECK(line.find(",0,0,") != std::string::npos);
  }

  TEST_CASE("export files parse with the expected schema") {
    TempDir dir;
    const EmbeddingSet data = small_blobs();
    const TrainResult r = train(small_config(), data);
    export_projection(r.checkpoint, data, dir / "proj.csv");
    const std::string csv = slurp(dir / "proj.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);

    knn_report(r.checkpoint, data, 3, dir / "knn.json");
    const auto j = nlohmann::json::parse(slurp(dir / "knn.json"));
    CHECK(j["k"] == 3);
    REQUIRE(j["clusters"].size() == 3);
    for (const auto& c : j["clusters"]) {
      CHECK(c.contains("cluster"));
      CHECK(c["short"] == false);
      REQUIRE(c["nearest"].size() == 3);
      double prev = -1.0;
      for (std::size_t r2 = 0; r2 < 3; ++r2) {
        CHECK(c["nearest"][r2]["rank"] == r2 + 1);
        CHECK(c["nearest"][r2]["index"].get<std::size_t>() < 60);
        CHECK(c["nearest"][r2]["distance"].get<double>() >= prev);
        prev = c["nearest"][r2]["distance"].get<double>();
      }
    }
  }

  TEST_CASE("k=1 picks the sample nearest each centroid") {
    const EmbeddingSet data = small_blobs();
    const TrainResult r = train(small_config(), data);
    const Matrix reps = representations(r.checkpoint.head, data, 0);
    const Evaluation ev = evaluate(r.checkpoint, data);
    const auto nn = knn_to_centroid(reps, ev.cluster, 1);
    for (const auto& c : nn) {
      double best = 1e300;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < reps.rows(); ++i) {
        if (ev.cluster.assignments[i] != static_cast<int>(c.cluster)) continue;
        const double d = std::sqrt(squared_distance(reps.row(i), ev.cluster.centroids.row(c.cluster)));
        if (d < best) best = d, arg = i;
      }
      CHECK(c.nearest[0].index == arg);
    }
  }

  TEST_CASE("raw k-means baseline") {
    const Evaluation ev = evaluate_raw(small_blobs(), {3, 5, 300, 1e-6}, 1, false);
    CHECK(*ev.metrics.acc == 1.0);
    const auto j = nlohmann::json::parse(evaluation_to_json(ev));
    CHECK(j["acc"] == 1.0);
    CHECK(j["k"] == 3);
  }
}

TEST_SUITE("gradcheck suite") {
  TEST_CASE("passes by default and fails with a broken component") {
    GradcheckOptions opts;
    opts.trials = 10;
    CHECK(run_gradcheck(opts).passed());
    for (const std::string& c : gradcheck_components()) {
      opts.break_component = c;
      const GradcheckReport r = run_gradcheck(opts);
      CHECK_FALSE(r.passed());
    }
    opts.break_component = "nonsense";
    CHECK_THROWS_AS(run_gradcheck(opts), UsageError);
  }
}
