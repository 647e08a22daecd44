// Command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pgjr/pgjr.h"

namespace {

struct Deleter {
  void operator()(pgjr_embeddings* p) const { pgjr_embeddings_free(p); }
  void operator()(pgjr_config* p) const { pgjr_config_free(p); }
  void operator()(pgjr_checkpoint* p) const { pgjr_checkpoint_free(p); }
  void operator()(char* p) const { pgjr_string_free(p); }
};

template <typename T>
using Handle = std::unique_ptr<T, Deleter>;

int report(pgjr_status status) {
  if (status != PGJR_OK) std::fprintf(stderr, "pgjr: %s\n", pgjr_last_error());
  return static_cast<int>(status);
}

#define PGJR_TRY(expr)                         \
  do {                                         \
    const pgjr_status status_ = (expr);        \
    if (status_ != PGJR_OK) return report(status_); \
  } while (0)

int load_data(const std::string& path, Handle<pgjr_embeddings>& out) {
  pgjr_embeddings* raw = nullptr;
  const pgjr_status s = pgjr_embeddings_load(path.c_str(), &raw);
  out.reset(raw);
  return report(s);
}

int load_ckpt(const std::string& path, Handle<pgjr_checkpoint>& out) {
  pgjr_checkpoint* raw = nullptr;
  const pgjr_status s = pgjr_checkpoint_load(path.c_str(), &raw);
  out.reset(raw);
  return report(s);
}

void print_and_free(char* text) {
  Handle<char> owned(text);
  if (owned) std::fputs(owned.get(), stdout);
  std::fputc('\n', stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pgjr: grid jigsaw representation clustering engine"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: PGJR_THREADS or hardware)");

  std::string config_path, data_path, out_path, ckpt_path, resume_path, break_component;
  unsigned k = 3, restarts = 20, trials = 50;
  std::uint64_t seed = 0;
  double threshold = 1e-4;
  bool normalize = false;

  auto* train = app.add_subcommand("train", "Train a head and write report, losses and checkpoint");
  train->add_option("--config", config_path, "JSON config")->required();
  train->add_option("--data", data_path, "Embedding file")->required();
  train->add_option("--out", out_path, "Output directory")->required();
  train->add_option("--resume", resume_path, "Checkpoint to continue from");

  auto* eval = app.add_subcommand("eval", "Cluster and score a trained checkpoint");
  eval->add_option("--ckpt", ckpt_path, "Checkpoint file")->required();
  eval->add_option("--data", data_path, "Embedding file")->required();

  auto* km = app.add_subcommand("kmeans", "k-means baseline on the raw embeddings");
  km->add_option("--data", data_path, "Embedding file")->required();
  km->add_option("--k", k, "Cluster count")->required();
  km->add_option("--restarts", restarts, "k-means restarts")->capture_default_str();
  km->add_option("--seed", seed, "Seed")->capture_default_str();
  km->add_flag("--normalize", normalize, "L2-normalise embeddings first");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every analytic gradient");
  gc->add_option("--trials", trials, "Random instances per component")->capture_default_str();
  gc->add_option("--seed", seed, "Seed")->capture_default_str();
  gc->add_option("--threshold", threshold, "Maximum relative error")->capture_default_str();
  gc->add_option("--break", break_component, "Negate one component's gradient (negative control)");

  auto* project = app.add_subcommand("project", "Export a 2-D PCA projection as CSV");
  project->add_option("--ckpt", ckpt_path, "Checkpoint file")->required();
  project->add_option("--data", data_path, "Embedding file")->required();
  project->add_option("--out", out_path, "CSV path")->required();

  auto* knn = app.add_subcommand("knn", "Nearest samples to each cluster centre as JSON");
  knn->add_option("--ckpt", ckpt_path, "Checkpoint file")->required();
  knn->add_option("--data", data_path, "Embedding file")->required();
  knn->add_option("--k", k, "Neighbours per cluster")->capture_default_str();
  knn->add_option("--out", out_path, "JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return PGJR_ERR_USAGE;
  }

  if (threads > 0) PGJR_TRY(pgjr_set_threads(threads));

  Handle<pgjr_embeddings> data;
  Handle<pgjr_checkpoint> ckpt;

  if (*train) {
    pgjr_config* raw_cfg = nullptr;
    const pgjr_status s = pgjr_config_load(config_path.c_str(), &raw_cfg);
    Handle<pgjr_config> cfg(raw_cfg);
    if (s != PGJR_OK) return report(s);
    if (int rc = load_data(data_path, data)) return rc;
    if (!resume_path.empty())
      if (int rc = load_ckpt(resume_path, ckpt)) return rc;
    PGJR_TRY(pgjr_train(cfg.get(), data.get(), ckpt.get(), out_path.c_str(), nullptr, nullptr));
    std::printf("wrote %s/{report.json,losses.csv,timing.json,checkpoint.bin}\n", out_path.c_str());
    return 0;
  }
  if (*eval) {
    if (int rc = load_ckpt(ckpt_path, ckpt)) return rc;
    if (int rc = load_data(data_path, data)) return rc;
    char* json = nullptr;
    PGJR_TRY(pgjr_evaluate(ckpt.get(), data.get(), &json));
    print_and_free(json);
    return 0;
  }
  if (*km) {
    if (int rc = load_data(data_path, data)) return rc;
    char* json = nullptr;
    PGJR_TRY(pgjr_kmeans_raw(data.get(), k, restarts, seed, normalize ? 1 : 0, &json));
    print_and_free(json);
    return 0;
  }
  if (*gc) {
    char* table = nullptr;
    const pgjr_status s = pgjr_gradcheck(trials, seed, threshold,
                                         break_component.empty() ? nullptr : break_component.c_str(),
                                         &table);
    Handle<char> owned(table);
    if (owned) std::fputs(owned.get(), stdout);
    return report(s);
  }
  if (*project) {
    if (int rc = load_ckpt(ckpt_path, ckpt)) return rc;
    if (int rc = load_data(data_path, data)) return rc;
    PGJR_TRY(pgjr_export_projection(ckpt.get(), data.get(), out_path.c_str()));
    return 0;
  }
  if (*knn) {
    if (int rc = load_ckpt(ckpt_path, ckpt)) return rc;
    if (int rc = load_data(data_path, data)) return rc;
    PGJR_TRY(pgjr_knn_report(ckpt.get(), data.get(), k, out_path.c_str()));
    return 0;
  }
  return PGJR_ERR_USAGE;
}
