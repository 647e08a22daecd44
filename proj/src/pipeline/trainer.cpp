#include "pgjr/pipeline/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "json.hpp"
#include "pgjr/error.hpp"
#include "pgjr/idfd/losses.hpp"
#include "pgjr/numerics/layers.hpp"
#include "pgjr/numerics/rng.hpp"
#include "pgjr/numerics/sgd.hpp"
#include "pgjr/pipeline/binary_io.hpp"

namespace pgjr {

using nlohmann::json;

Checkpoint initial_checkpoint(const TrainConfig& cfg, const EmbeddingSet& data) {
  cfg.validate_for(data.n, data.dim);
  Rng projection_rng(cfg.seed, RngStream::ProjectionInit);
  Rng gjr_rng(cfg.seed, RngStream::GjrInit);
  Checkpoint c;
  c.config = cfg;
  c.config_hash = config_hash(cfg);
  c.head = make_head(cfg.head_init(data.dim), projection_rng, gjr_rng);
  const auto params = c.head.trainable();
  c.optimizer = SgdState(params, cfg.lr0, cfg.momentum, cfg.weight_decay).buffers;
  c.bank = MemoryBank::init(head_outputs(c.head, data, 0), cfg.bank_momentum);
  return c;
}

namespace {

void check_resume(const TrainConfig& cfg, const EmbeddingSet& data, const Checkpoint& ckpt) {
  if (ckpt.config_hash != config_hash(cfg))
    throw UsageError("resume: checkpoint was produced with a different config");
  if (ckpt.head.n_in() != data.dim || ckpt.bank.size() != data.n)
    throw UsageError("resume: checkpoint does not match the data dimensions");
  if (ckpt.epoch > cfg.epochs)
    throw UsageError("resume: checkpoint is already past epoch " + std::to_string(cfg.epochs));
}

struct StepContext {
  std::size_t epoch;
  std::size_t batch;
};

[[noreturn]] void diverged(const StepContext& at, const std::string& what) {
  throw NumericalError("training diverged at epoch " + std::to_string(at.epoch + 1) +
                       ", batch " + std::to_string(at.batch) + ": " + what);
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const EmbeddingSet& data, const Checkpoint* resume) {
  cfg.validate_for(data.n, data.dim);
  TrainResult result;
  Checkpoint& state = result.checkpoint;
  if (resume) {
    check_resume(cfg, data, *resume);
    state = *resume;
  } else {
    state = initial_checkpoint(cfg, data);
  }
  state.config = cfg;

  RunReport& report = result.report;
  report.has_labels = data.has_labels();

  const auto params = state.head.trainable();
  SgdState opt;
  opt.buffers = std::move(state.optimizer);
  opt.momentum = cfg.momentum;
  opt.weight_decay = cfg.weight_decay;
  if (opt.buffers.size() != params.size())
    throw UsageError("resume: optimizer state does not match the head parameters");

  Rng shuffle(cfg.seed, RngStream::Shuffle);
  shuffle.set_counter(state.shuffle_counter);
  std::vector<std::size_t> order(data.n);
  const KmeansOptions eval_opts{cfg.k, cfg.eval_restarts, cfg.kmeans_max_iter, cfg.kmeans_tol};

  const std::size_t first_epoch = state.epoch;
  for (std::size_t epoch = first_epoch; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t view = epoch % data.views;
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);
    opt.lr = cfg.learning_rate(epoch);

    EpochLoss loss;
    loss.epoch = epoch + 1;
    loss.lr = opt.lr;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < data.n; start += cfg.batch_size, ++batch_no) {
      const std::size_t end = std::min(data.n, start + cfg.batch_size);
      // Decorrelation needs two samples; a trailing singleton is skipped.
      if (end - start < 2) continue;
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const StepContext at{epoch, batch_no};
      try {
        const Matrix x = data.gather(idx, view);
        HeadCache cache;
        const Matrix z = head_forward(state.head, x, &cache);
        const Matrix v = normalize_rows(z);
        const TotalLoss tl =
            total_loss(v, idx, state.bank, cfg.tau1, cfg.tau2, cfg.loss_reduction);
        if (!std::isfinite(tl.breakdown.total) || !all_finite(tl.grad.values()))
          diverged(at, "loss is not finite");
        head_backward(state.head, cache, normalize_rows_backward(z, tl.grad), false);
        sgd_step(params, opt);
        state.bank.update(idx, v);
        loss.instance += tl.breakdown.instance;
        loss.decorrelation += tl.breakdown.decorrelation;
        ++loss.batches;
      } catch (const NumericalError& e) {
        if (std::string(e.what()).rfind("training diverged", 0) == 0) throw;
        diverged(at, e.what());
      }
    }
    if (loss.batches > 0) {
      loss.instance /= static_cast<double>(loss.batches);
      loss.decorrelation /= static_cast<double>(loss.batches);
    }
    loss.total = loss.instance + loss.decorrelation;
    report.losses.push_back(loss);
    state.epoch = static_cast<std::uint32_t>(epoch + 1);

    if (report.has_labels && (epoch + 1) % cfg.eval_every == 0) {
      const Matrix reps = representations(state.head, data, 0);
      const std::uint64_t seed = Rng(cfg.seed, RngStream::TrainEval, epoch + 1).next_u64();
      const Evaluation ev = cluster_and_score(reps, data, eval_opts, seed);
      report.evals.push_back({epoch + 1, ev.metrics, ev.cluster.inertia});
    }
    report.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  state.optimizer = std::move(opt.buffers);
  state.shuffle_counter = shuffle.counter();

  if (state.epoch > first_epoch) {
    Evaluation final_eval = evaluate(state, data);
    report.final_metrics = final_eval.metrics;
    report.final_cluster = std::move(final_eval.cluster);
  }
  return result;
}

namespace {

void put_metrics(json& j, const LabelledMetrics& m) {
  if (m.acc) j["acc"] = *m.acc;
  if (m.nmi) j["nmi"] = *m.nmi;
  if (m.ari) j["ari"] = *m.ari;
  if (m.silhouette) j["silhouette"] = *m.silhouette;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const RunReport& report, const TrainConfig& cfg) {
  json j;
  j["config"] = config_to_json(cfg);
  j["has_labels"] = report.has_labels;
  json losses = json::array();
  for (const auto& l : report.losses)
    losses.push_back({{"epoch", l.epoch},
                      {"lr", l.lr},
                      {"instance", l.instance},
                      {"decorrelation", l.decorrelation},
                      {"total", l.total},
                      {"batches", l.batches}});
  j["losses"] = losses;
  json evals = json::array();
  for (const auto& e : report.evals) {
    json p{{"epoch", e.epoch}, {"inertia", e.inertia}};
    put_metrics(p, e.metrics);
    evals.push_back(p);
  }
  j["evals"] = evals;
  if (report.final_cluster) {
    const ClusterResult& c = *report.final_cluster;
    json f{{"inertia", c.inertia}, {"restarts_run", c.restarts_run}, {"k", c.centroids.rows()}};
    put_metrics(f, report.final_metrics);
    std::vector<std::size_t> sizes(c.centroids.rows(), 0);
    for (int a : c.assignments) ++sizes[static_cast<std::size_t>(a)];
    f["cluster_sizes"] = sizes;
    f["assignments"] = c.assignments;
    j["final"] = f;
  } else {
    j["final"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string losses_to_csv(const RunReport& report) {
  std::string out = "epoch,lr,instance,decorrelation,total\n";
  for (const auto& l : report.losses)
    out += std::to_string(l.epoch) + "," + fmt_double(l.lr) + "," + fmt_double(l.instance) + "," +
           fmt_double(l.decorrelation) + "," + fmt_double(l.total) + "\n";
  return out;
}

void write_run_outputs(const TrainResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataFormatError("cannot create output directory " + dir + ": " + ec.message());
  const std::filesystem::path root(dir);
  io::write_text((root / "report.json").string(),
                 report_to_json(result.report, result.checkpoint.config));
  io::write_text((root / "losses.csv").string(), losses_to_csv(result.report));
  io::write_text((root / "timing.json").string(),
                 json{{"epoch_seconds", result.report.epoch_seconds}}.dump(2) + "\n");
  save_checkpoint(result.checkpoint, (root / "checkpoint.bin").string());
}

}  // namespace pgjr
