#include <aetas/aetas.h>

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/drift.hpp"
#include "core/pipeline.hpp"
#include "core/sgns.hpp"
#include "core/synth.hpp"
#include "core/util.hpp"

namespace {

thread_local std::string g_last_error;

aetas_status fail(aetas_status code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

// Runs fn, translating the error taxonomy into status codes.
template <typename Fn>
aetas_status guarded(Fn&& fn) {
  try {
    fn();
    return AETAS_OK;
  } catch (const aetas::ConfigError& e) {
    return fail(AETAS_ERR_CONFIG, e.what());
  } catch (const aetas::DataError& e) {
    return fail(AETAS_ERR_DATA, e.what());
  } catch (const aetas::NumericError& e) {
    return fail(AETAS_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AETAS_ERR, "out of memory");
  } catch (const std::exception& e) {
    return fail(AETAS_ERR, e.what());
  } catch (...) {
    return fail(AETAS_ERR, "unknown failure");
  }
}

aetas_status require(bool ok, const char* what) {
  return ok ? AETAS_OK : fail(AETAS_ERR_CONFIG, what);
}

}  // namespace

struct aetas_pipeline {
  aetas::pipeline::Pipeline impl;
};

struct aetas_space {
  aetas::emb::EmbeddingSpace impl;
};

struct aetas_neighbor_list {
  std::vector<aetas::drift::Neighbor> impl;
};

extern "C" {

const char* aetas_version(void) { return aetas::kVersion; }

const char* aetas_last_error(void) { return g_last_error.c_str(); }

aetas_status aetas_pipeline_open(const char* config_path, const char* output_dir,
                                 const uint64_t* seed, aetas_pipeline** out) {
  if (auto s = require(config_path && out, "config_path and out must be non-NULL"))
    return s;
  *out = nullptr;
  return guarded([&] {
    aetas::config::Overrides ov;
    if (output_dir) ov.output_dir = std::filesystem::path(output_dir);
    if (seed) ov.seed = *seed;
    auto cfg = aetas::config::load_pipeline_config(config_path, ov);
    *out = new aetas_pipeline{aetas::pipeline::Pipeline(std::move(cfg))};
  });
}

aetas_status aetas_pipeline_run_stage(aetas_pipeline* p, const char* stage,
                                      int* executed) {
  if (auto s = require(p && stage, "pipeline and stage must be non-NULL")) return s;
  return guarded([&] {
    bool ran = p->impl.run_stage(stage);
    if (executed) *executed = ran ? 1 : 0;
  });
}

aetas_status aetas_pipeline_run_all(aetas_pipeline* p, int* n_executed) {
  if (auto s = require(p != nullptr, "pipeline must be non-NULL")) return s;
  return guarded([&] {
    auto ran = p->impl.run_all();
    if (n_executed) *n_executed = static_cast<int>(ran.size());
  });
}

void aetas_pipeline_close(aetas_pipeline* p) { delete p; }

aetas_status aetas_synth_generate(const char* spec_path, const char* out_dir) {
  if (auto s = require(out_dir != nullptr, "out_dir must be non-NULL")) return s;
  return guarded([&] {
    auto spec = spec_path ? aetas::synth::load_synth_spec(spec_path)
                          : aetas::synth::SynthSpec::desk_default();
    aetas::pipeline::generate_synth(spec, out_dir);
  });
}

aetas_status aetas_space_load(const char* vec_path, aetas_space** out) {
  if (auto s = require(vec_path && out, "vec_path and out must be non-NULL"))
    return s;
  *out = nullptr;
  return guarded([&] { *out = new aetas_space{aetas::emb::load_space(vec_path)}; });
}

void aetas_space_free(aetas_space* s) { delete s; }

int aetas_space_dim(const aetas_space* s) { return s ? s->impl.dim() : 0; }

size_t aetas_space_vocab_size(const aetas_space* s) {
  return s ? s->impl.vocab.size() : 0;
}

const char* aetas_space_label(const aetas_space* s) {
  return s ? s->impl.label.c_str() : "";
}

int aetas_space_contains(const aetas_space* s, const char* word) {
  if (!s || !word) return 0;
  return s->impl.vocab.find(word) ? 1 : 0;
}

aetas_status aetas_space_neighbors(const aetas_space* s, const char* word,
                                   size_t k, aetas_neighbor_list** out) {
  if (auto st = require(s && word && out, "space, word, and out must be non-NULL"))
    return st;
  *out = nullptr;
  return guarded([&] {
    *out = new aetas_neighbor_list{aetas::drift::top_k_neighbors(s->impl, word, k)};
  });
}

size_t aetas_neighbor_count(const aetas_neighbor_list* l) {
  return l ? l->impl.size() : 0;
}

const char* aetas_neighbor_word(const aetas_neighbor_list* l, size_t i) {
  if (!l || i >= l->impl.size()) return "";
  return l->impl[i].word.c_str();
}

double aetas_neighbor_score(const aetas_neighbor_list* l, size_t i) {
  if (!l || i >= l->impl.size()) return 0.0;
  return l->impl[i].score;
}

void aetas_neighbor_list_free(aetas_neighbor_list* l) { delete l; }

aetas_status aetas_cosine_drift(const aetas_space* a, const aetas_space* b,
                                const char* word, double* out) {
  if (auto s = require(a && b && word && out,
                       "spaces, word, and out must be non-NULL"))
    return s;
  return guarded([&] { *out = aetas::drift::cosine_drift(a->impl, b->impl, word); });
}

}  // extern "C"
