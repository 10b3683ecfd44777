#include "uniasm.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "common/errors.hpp"
#include "common/io.hpp"
#include "dataset/dataset.hpp"
#include "frontend/corpus.hpp"
#include "model/checkpoint.hpp"
#include "search/search.hpp"
#include "train/trainer.hpp"

using namespace uniasm;

struct uniasm_corpus {
    std::vector<Function> functions;
};
struct uniasm_vocab {
    Vocabulary vocab;
};
struct uniasm_dataset {
    DatasetHeader header;
    std::vector<DatasetRecord> records;
};
struct uniasm_model {
    Parameters<float> params;
};
struct uniasm_pool {
    EmbeddingPool pool;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
int guard(Fn&& fn) {
    try {
        fn();
        return UNIASM_OK;
    } catch (const ValidationError& e) {
        g_last_error = e.what();
        return UNIASM_ERR_VALIDATION;
    } catch (const RuntimeFault& e) {
        g_last_error = e.what();
        return UNIASM_ERR_RUNTIME;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return UNIASM_ERR_RUNTIME;
    }
}

int require(bool ok, const char* what) {
    if (!ok) {
        g_last_error = what;
        return UNIASM_ERR_VALIDATION;
    }
    return UNIASM_OK;
}

nlohmann::json recall_report_json(const RecallReport& report) {
    return {{"task", report.task},
            {"k", report.k},
            {"pool_size", report.pool_size},
            {"recall", report.recall},
            {"ranks", report.ranks}};
}

} // namespace

extern "C" {

const char* uniasm_version(void) { return "1.0.0"; }

const char* uniasm_last_error(void) { return g_last_error.c_str(); }

void uniasm_string_free(char* s) { std::free(s); }

int uniasm_file_fingerprint(const char* path, char** hex_out) {
    if (int rc = require(path && hex_out, "null argument")) return rc;
    return guard([&] { *hex_out = dup_string(file_fingerprint(path)); });
}

int uniasm_corpus_load(const char* path, uniasm_corpus** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guard([&] {
        auto c = std::make_unique<uniasm_corpus>();
        c->functions = load_corpus(path);
        *out = c.release();
    });
}

void uniasm_corpus_free(uniasm_corpus* c) { delete c; }

uint64_t uniasm_corpus_size(const uniasm_corpus* c) {
    return c ? c->functions.size() : 0;
}

int uniasm_corpus_stats_json(const uniasm_corpus* c, char** json_out) {
    if (int rc = require(c && json_out, "null argument")) return rc;
    return guard([&] {
        CorpusStats stats = corpus_stats(c->functions);
        nlohmann::json j;
        j["functions"] = stats.functions;
        j["instructions"] = stats.instructions;
        j["with_cfg"] = stats.with_cfg;
        j["length_buckets"] = {{"0-128", stats.length_buckets[0]},
                               {"129-256", stats.length_buckets[1]},
                               {"257-512", stats.length_buckets[2]},
                               {"513-1024", stats.length_buckets[3]},
                               {">1024", stats.length_buckets[4]}};
        nlohmann::json variants = nlohmann::json::object();
        for (const auto& [key, count] : stats.functions_per_variant) {
            variants[key] = count;
        }
        j["functions_per_variant"] = variants;
        *json_out = dup_string(j.dump(2));
    });
}

int uniasm_vocab_build(const uniasm_corpus* c, const char* tokenizer_mode,
                       const char* serialization, uint64_t seed, uint64_t cap,
                       uniasm_vocab** out) {
    if (int rc = require(c && tokenizer_mode && serialization && out, "null argument")) return rc;
    return guard([&] {
        TokenizerConfig config;
        config.mode = tokenizer_mode_from_string(tokenizer_mode);
        config.vocab_cap = cap;
        Serialization ser = serialization_from_string(serialization);

        std::unordered_map<std::string, uint64_t> freq;
        for (const Function& f : c->functions) {
            count_tokens(function_tokens(f, config.mode, ser, seed), freq);
        }
        auto v = std::make_unique<uniasm_vocab>();
        v->vocab = Vocabulary::build(freq, config);
        *out = v.release();
    });
}

int uniasm_vocab_save(const uniasm_vocab* v, const char* path) {
    if (int rc = require(v && path, "null argument")) return rc;
    return guard([&] { v->vocab.save(path); });
}

int uniasm_vocab_load(const char* path, uniasm_vocab** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guard([&] {
        auto v = std::make_unique<uniasm_vocab>();
        v->vocab = Vocabulary::load(path);
        *out = v.release();
    });
}

void uniasm_vocab_free(uniasm_vocab* v) { delete v; }

uint64_t uniasm_vocab_size(const uniasm_vocab* v) { return v ? v->vocab.size() : 0; }

int uniasm_dataset_build(const uniasm_corpus* c, const uniasm_vocab* v,
                         const char* tokenizer_mode, const char* serialization, uint64_t max_sl,
                         uint64_t min_instructions, uint64_t seed, uniasm_dataset** out) {
    if (int rc = require(c && v && tokenizer_mode && serialization && out, "null argument")) {
        return rc;
    }
    return guard([&] {
        DatasetBuildConfig config;
        config.tokenizer_mode = tokenizer_mode_from_string(tokenizer_mode);
        config.serialization = serialization_from_string(serialization);
        config.max_sl = max_sl;
        config.min_instructions = min_instructions;
        config.seed = seed;

        auto d = std::make_unique<uniasm_dataset>();
        d->records = build_dataset(c->functions, v->vocab, config);
        d->header.max_sl = max_sl;
        d->header.tokenizer = config.tokenizer_mode;
        d->header.serialization = config.serialization;
        *out = d.release();
    });
}

int uniasm_dataset_split(const uniasm_dataset* d, double train_ratio, uint64_t seed,
                         uniasm_dataset** train_out, uniasm_dataset** validation_out) {
    if (int rc = require(d && train_out && validation_out, "null argument")) return rc;
    return guard([&] {
        auto [train, validation] = split_shuffle(d->records, train_ratio, seed);
        auto t = std::make_unique<uniasm_dataset>();
        t->header = d->header;
        t->records = std::move(train);
        auto v = std::make_unique<uniasm_dataset>();
        v->header = d->header;
        v->records = std::move(validation);
        *train_out = t.release();
        *validation_out = v.release();
    });
}

int uniasm_dataset_save(const uniasm_dataset* d, const char* path, const char* vocab_hash) {
    if (int rc = require(d && path, "null argument")) return rc;
    return guard([&] {
        DatasetHeader header = d->header;
        if (vocab_hash) header.vocab_hash = vocab_hash;
        save_dataset(path, header, d->records);
    });
}

int uniasm_dataset_load(const char* path, uniasm_dataset** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guard([&] {
        auto d = std::make_unique<uniasm_dataset>();
        auto [header, records] = load_dataset(path);
        d->header = header;
        d->records = std::move(records);
        *out = d.release();
    });
}

void uniasm_dataset_free(uniasm_dataset* d) { delete d; }

uint64_t uniasm_dataset_size(const uniasm_dataset* d) { return d ? d->records.size() : 0; }

int uniasm_dataset_header_json(const uniasm_dataset* d, char** json_out) {
    if (int rc = require(d && json_out, "null argument")) return rc;
    return guard([&] {
        nlohmann::json j = {{"vocab_hash", d->header.vocab_hash},
                            {"max_sl", d->header.max_sl},
                            {"tokenizer", to_string(d->header.tokenizer)},
                            {"serialization", to_string(d->header.serialization)},
                            {"records", d->records.size()}};
        *json_out = dup_string(j.dump());
    });
}

int uniasm_model_init(uint32_t layers, uint32_t heads, uint32_t hidden, uint32_t intermediate,
                      uint32_t max_sl, uint32_t vocab, uint64_t seed, uniasm_model** out) {
    if (int rc = require(out != nullptr, "null argument")) return rc;
    return guard([&] {
        ModelConfig config;
        config.layers = layers;
        config.heads = heads;
        config.hidden = hidden;
        config.intermediate = intermediate;
        config.max_sl = max_sl;
        config.vocab = vocab;
        auto m = std::make_unique<uniasm_model>();
        m->params = init_parameters<float>(config, seed);
        *out = m.release();
    });
}

int uniasm_model_load(const char* path, uniasm_model** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guard([&] {
        auto m = std::make_unique<uniasm_model>();
        m->params = load_checkpoint(path);
        *out = m.release();
    });
}

int uniasm_model_save(const uniasm_model* m, const char* path) {
    if (int rc = require(m && path, "null argument")) return rc;
    return guard([&] { save_checkpoint(path, m->params); });
}

void uniasm_model_free(uniasm_model* m) { delete m; }

int uniasm_model_config_json(const uniasm_model* m, char** json_out) {
    if (int rc = require(m && json_out, "null argument")) return rc;
    return guard([&] {
        const ModelConfig& c = m->params.config;
        nlohmann::json j = {{"layers", c.layers},           {"heads", c.heads},
                            {"hidden", c.hidden},           {"intermediate", c.intermediate},
                            {"max_sl", c.max_sl},           {"vocab", c.vocab}};
        *json_out = dup_string(j.dump());
    });
}

int uniasm_train(uniasm_model* m, const uniasm_dataset* train_data, const char* config_json,
                 const char* run_dir, char** outcome_json_out) {
    if (int rc = require(m && train_data && run_dir, "null argument")) return rc;
    return guard([&] {
        TrainConfig config;
        if (config_json && *config_json) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(std::string("bad train config: ") + e.what());
            }
            config.batch = j.value("batch", config.batch);
            config.lr = j.value("lr", config.lr);
            config.warmup = j.value("warmup", config.warmup);
            config.max_steps = j.value("max_steps", config.max_steps);
            config.checkpoint_every = j.value("checkpoint_every", config.checkpoint_every);
            config.seed = j.value("seed", config.seed);
            config.mlm_rate = j.value("mlm_rate", config.mlm_rate);
            if (j.contains("tasks")) {
                config.task_alg = false;
                config.task_sfp = false;
                config.task_mlm = false;
                for (const auto& task : j.at("tasks")) {
                    std::string name = task.get<std::string>();
                    if (name == "alg") config.task_alg = true;
                    else if (name == "sfp") config.task_sfp = true;
                    else if (name == "mlm") config.task_mlm = true;
                    else throw ValidationError("unknown training task: " + name);
                }
            }
        }
        TrainOutcome outcome = train_loop(train_data->records, m->params, config, run_dir);
        if (outcome_json_out) {
            nlohmann::json j = {{"steps", outcome.steps},
                                {"final_loss", outcome.final_loss},
                                {"final_checkpoint", outcome.final_checkpoint}};
            *outcome_json_out = dup_string(j.dump());
        }
    });
}

int uniasm_embed(const uniasm_model* m, const uniasm_corpus* c, const uniasm_vocab* v,
                 const char* tokenizer_mode, const char* serialization, uint64_t seed,
                 uniasm_pool** out) {
    if (int rc = require(m && c && v && tokenizer_mode && serialization && out, "null argument")) {
        return rc;
    }
    return guard([&] {
        auto p = std::make_unique<uniasm_pool>();
        p->pool = build_pool(c->functions, m->params, v->vocab,
                             tokenizer_mode_from_string(tokenizer_mode),
                             serialization_from_string(serialization), seed);
        *out = p.release();
    });
}

int uniasm_pool_save(const uniasm_pool* p, const char* path) {
    if (int rc = require(p && path, "null argument")) return rc;
    return guard([&] { save_pool(path, p->pool); });
}

int uniasm_pool_load(const char* path, uniasm_pool** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guard([&] {
        auto p = std::make_unique<uniasm_pool>();
        p->pool = load_pool(path);
        *out = p.release();
    });
}

void uniasm_pool_free(uniasm_pool* p) { delete p; }

uint64_t uniasm_pool_size(const uniasm_pool* p) { return p ? p->pool.size() : 0; }

int uniasm_pool_export_tsv(const uniasm_pool* p, const char* path) {
    if (int rc = require(p && path, "null argument")) return rc;
    return guard([&] { export_pool_tsv(path, p->pool); });
}

int uniasm_search_topk(const uniasm_pool* queries, const uniasm_pool* targets, uint64_t k,
                       char** jsonl_out) {
    if (int rc = require(queries && targets && jsonl_out, "null argument")) return rc;
    return guard([&] {
        std::string out;
        for (size_t i = 0; i < queries->pool.size(); ++i) {
            Vec<float> q = queries->pool.matrix.row(static_cast<Eigen::Index>(i)).transpose();
            std::vector<ScoredHit> hits = cosine_topk(q, targets->pool, k);
            nlohmann::json hits_json = nlohmann::json::array();
            for (const ScoredHit& hit : hits) {
                const PoolLabel& label = targets->pool.labels[hit.index];
                hits_json.push_back({{"project", label.project},
                                     {"func", label.func_name},
                                     {"variant", to_string(label.key)},
                                     {"score", hit.score}});
            }
            const PoolLabel& qlabel = queries->pool.labels[i];
            nlohmann::json line = {{"query",
                                    {{"project", qlabel.project},
                                     {"func", qlabel.func_name},
                                     {"variant", to_string(qlabel.key)}}},
                                   {"hits", hits_json}};
            out += line.dump();
            out += "\n";
        }
        *jsonl_out = dup_string(out);
    });
}

int uniasm_eval_task(const uniasm_pool* corpus_pool, const char* task, const uint32_t* ks,
                     size_t ks_len, char** json_out) {
    if (int rc = require(corpus_pool && task && ks && ks_len > 0 && json_out, "null argument")) {
        return rc;
    }
    return guard([&] {
        TaskSpec spec = task_from_string(task);
        TaskPools pools = build_task_pools(corpus_pool->pool, spec);
        nlohmann::json reports = nlohmann::json::array();
        for (size_t i = 0; i < ks_len; ++i) {
            RecallReport report =
                recall_at_k(pools.source, pools.target, pools.ground_truth, ks[i], spec.name());
            reports.push_back(recall_report_json(report));
        }
        nlohmann::json j = {{"task", spec.name()},
                            {"pool_size", pools.source.size()},
                            {"reports", reports}};
        *json_out = dup_string(j.dump());
    });
}

int uniasm_eval_vuln(const uniasm_pool* queries, const uniasm_pool* targets, uint64_t k,
                     double* recall_out) {
    if (int rc = require(queries && targets && recall_out, "null argument")) return rc;
    return guard([&] { *recall_out = vuln_search(queries->pool, targets->pool, k); });
}

} // extern "C"
