#include "pgjr/pgjr.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "pgjr/error.hpp"
#include "pgjr/numerics/parallel.hpp"
#include "pgjr/pipeline/checkpoint.hpp"
#include "pgjr/pipeline/config.hpp"
#include "pgjr/pipeline/embeddings.hpp"
#include "pgjr/pipeline/evaluate.hpp"
#include "pgjr/pipeline/gradcheck.hpp"
#include "pgjr/pipeline/trainer.hpp"

struct pgjr_embeddings {
  pgjr::EmbeddingSet set;
};

struct pgjr_config {
  pgjr::TrainConfig cfg;
};

struct pgjr_checkpoint {
  pgjr::Checkpoint ckpt;
};

namespace {

thread_local std::string last_error;

pgjr_status fail(pgjr_status status, const std::string& msg) {
  last_error = msg;
  return status;
}

template <typename Fn>
pgjr_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const pgjr::UsageError& e) {
    return fail(PGJR_ERR_USAGE, e.what());
  } catch (const pgjr::DataFormatError& e) {
    return fail(PGJR_ERR_DATA, e.what());
  } catch (const pgjr::NumericalError& e) {
    return fail(PGJR_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PGJR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PGJR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PGJR_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw pgjr::UsageError(std::string(name) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* pgjr_version(void) { return "0.1.0"; }

const char* pgjr_last_error(void) { return last_error.c_str(); }

void pgjr_string_free(char* s) { delete[] s; }

pgjr_status pgjr_set_threads(unsigned threads) {
  return guarded([&] {
    if (threads == 0)
      pgjr::reset_thread_count();
    else
      pgjr::set_thread_count(threads);
    return PGJR_OK;
  });
}

pgjr_status pgjr_embeddings_load(const char* path, pgjr_embeddings** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pgjr_embeddings{pgjr::load_embeddings(path)};
    return PGJR_OK;
  });
}

pgjr_status pgjr_embeddings_create(uint32_t n, uint32_t views, uint32_t dim, const int32_t* labels,
                                   const float* data, pgjr_embeddings** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0 && views > 0 && dim > 0) require(data, "data");
    pgjr::EmbeddingSet set;
    set.n = n;
    set.views = views;
    set.dim = dim;
    set.labels.assign(n, -1);
    if (labels) set.labels.assign(labels, labels + n);
    const std::size_t count = std::size_t{n} * views * dim;
    set.data.assign(data, data + count);
    set.source_tag = "memory";
    set.validate();
    *out = new pgjr_embeddings{std::move(set)};
    return PGJR_OK;
  });
}

pgjr_status pgjr_embeddings_save(const pgjr_embeddings* e, const char* path) {
  return guarded([&] {
    require(e, "embeddings");
    require(path, "path");
    pgjr::write_embeddings(e->set, path);
    return PGJR_OK;
  });
}

pgjr_status pgjr_embeddings_info(const pgjr_embeddings* e, uint32_t* n, uint32_t* views,
                                 uint32_t* dim, int* has_labels) {
  return guarded([&] {
    require(e, "embeddings");
    if (n) *n = static_cast<uint32_t>(e->set.n);
    if (views) *views = static_cast<uint32_t>(e->set.views);
    if (dim) *dim = static_cast<uint32_t>(e->set.dim);
    if (has_labels) *has_labels = e->set.has_labels() ? 1 : 0;
    return PGJR_OK;
  });
}

void pgjr_embeddings_free(pgjr_embeddings* e) { delete e; }

pgjr_status pgjr_config_parse(const char* json, pgjr_config** out) {
  return guarded([&] {
    require(out, "out");
    const std::string text = json && *json ? json : "{}";
    *out = new pgjr_config{pgjr::parse_config(text)};
    return PGJR_OK;
  });
}

pgjr_status pgjr_config_load(const char* path, pgjr_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pgjr_config{pgjr::load_config(path)};
    return PGJR_OK;
  });
}

pgjr_status pgjr_config_to_json(const pgjr_config* cfg, char** json_out) {
  return guarded([&] {
    require(cfg, "config");
    require(json_out, "json_out");
    *json_out = dup_string(pgjr::config_to_json(cfg->cfg).dump(2));
    return PGJR_OK;
  });
}

void pgjr_config_free(pgjr_config* cfg) { delete cfg; }

pgjr_status pgjr_train(const pgjr_config* cfg, const pgjr_embeddings* data,
                       const pgjr_checkpoint* resume, const char* out_dir,
                       pgjr_checkpoint** ckpt_out, char** report_json_out) {
  return guarded([&] {
    require(cfg, "config");
    require(data, "embeddings");
    pgjr::TrainResult result = pgjr::train(cfg->cfg, data->set, resume ? &resume->ckpt : nullptr);
    if (out_dir) pgjr::write_run_outputs(result, out_dir);
    if (report_json_out)
      *report_json_out = dup_string(pgjr::report_to_json(result.report, result.checkpoint.config));
    if (ckpt_out) *ckpt_out = new pgjr_checkpoint{std::move(result.checkpoint)};
    return PGJR_OK;
  });
}

pgjr_status pgjr_checkpoint_load(const char* path, pgjr_checkpoint** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pgjr_checkpoint{pgjr::load_checkpoint(path)};
    return PGJR_OK;
  });
}

pgjr_status pgjr_checkpoint_save(const pgjr_checkpoint* ckpt, const char* path) {
  return guarded([&] {
    require(ckpt, "checkpoint");
    require(path, "path");
    pgjr::save_checkpoint(ckpt->ckpt, path);
    return PGJR_OK;
  });
}

pgjr_status pgjr_checkpoint_epoch(const pgjr_checkpoint* ckpt, uint32_t* epoch) {
  return guarded([&] {
    require(ckpt, "checkpoint");
    require(epoch, "epoch");
    *epoch = ckpt->ckpt.epoch;
    return PGJR_OK;
  });
}

void pgjr_checkpoint_free(pgjr_checkpoint* ckpt) { delete ckpt; }

pgjr_status pgjr_evaluate(const pgjr_checkpoint* ckpt, const pgjr_embeddings* data,
                          char** json_out) {
  return guarded([&] {
    require(ckpt, "checkpoint");
    require(data, "embeddings");
    require(json_out, "json_out");
    *json_out = dup_string(pgjr::evaluation_to_json(pgjr::evaluate(ckpt->ckpt, data->set)));
    return PGJR_OK;
  });
}

pgjr_status pgjr_kmeans_raw(const pgjr_embeddings* data, uint32_t k, uint32_t restarts,
                            uint64_t seed, int normalize, char** json_out) {
  return guarded([&] {
    require(data, "embeddings");
    require(json_out, "json_out");
    if (k == 0) throw pgjr::UsageError("k must be positive");
    pgjr::KmeansOptions opts;
    opts.k = k;
    opts.restarts = restarts == 0 ? 20 : restarts;
    *json_out = dup_string(
        pgjr::evaluation_to_json(pgjr::evaluate_raw(data->set, opts, seed, normalize != 0)));
    return PGJR_OK;
  });
}

pgjr_status pgjr_gradcheck(uint32_t trials, uint64_t seed, double threshold,
                           const char* break_component, char** table_out) {
  return guarded([&] {
    pgjr::GradcheckOptions opts;
    if (trials > 0) opts.trials = trials;
    opts.seed = seed;
    if (threshold > 0.0) opts.threshold = threshold;
    if (break_component) opts.break_component = break_component;
    const pgjr::GradcheckReport report = pgjr::run_gradcheck(opts);
    if (table_out) *table_out = dup_string(report.table());
    if (!report.passed()) return fail(PGJR_ERR_GRADCHECK, "gradient check failed");
    return PGJR_OK;
  });
}

pgjr_status pgjr_export_projection(const pgjr_checkpoint* ckpt, const pgjr_embeddings* data,
                                   const char* out_path) {
  return guarded([&] {
    require(ckpt, "checkpoint");
    require(data, "embeddings");
    require(out_path, "out_path");
    pgjr::export_projection(ckpt->ckpt, data->set, out_path);
    return PGJR_OK;
  });
}

pgjr_status pgjr_knn_report(const pgjr_checkpoint* ckpt, const pgjr_embeddings* data, uint32_t k,
                            const char* out_path) {
  return guarded([&] {
    require(ckpt, "checkpoint");
    require(data, "embeddings");
    require(out_path, "out_path");
    pgjr::knn_report(ckpt->ckpt, data->set, k, out_path);
    return PGJR_OK;
  });
}

}  // extern "C"
