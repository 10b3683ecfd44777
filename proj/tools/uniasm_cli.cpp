// Command-line front end. Links only the public C API; all pipeline logic
// lives behind it. Subcommands share one JSON config file whose values are
// overridden by flags (flags win). Exit codes: 0 ok, 1 validation, 2 runtime.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uniasm.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CliError {
    int status;
    std::string message;
};

[[noreturn]] void fail(int status, const std::string& message) {
    throw CliError{status, message};
}

// Checks a C API status and converts failures into a diagnostic carrying the
// library's last error.
void check(int rc, const std::string& what) {
    if (rc != UNIASM_OK) fail(rc, what + ": " + uniasm_last_error());
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    uniasm_string_free(s);
    return out;
}

// RAII wrappers over the opaque handles.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    ~Handle() { Free(ptr); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using CorpusHandle = Handle<uniasm_corpus, uniasm_corpus_free>;
using VocabHandle = Handle<uniasm_vocab, uniasm_vocab_free>;
using DatasetHandle = Handle<uniasm_dataset, uniasm_dataset_free>;
using ModelHandle = Handle<uniasm_model, uniasm_model_free>;
using PoolHandle = Handle<uniasm_pool, uniasm_pool_free>;

struct Settings {
    // paths
    std::string corpus;
    std::string vocab;
    std::string dataset;
    std::string dataset_validation;
    std::string run_dir = "runs/default";
    std::string checkpoint;
    std::string pool;
    std::string report;
    std::string output;
    std::string queries;
    std::string targets;
    // tokenizer
    std::string mode = "full-i";
    uint64_t vocab_cap = 21000;
    std::string serialization = "linear";
    // model; vocab 0 means "size of the vocabulary file"
    uint64_t layers = 4;
    uint64_t heads = 12;
    uint64_t hidden = 768;
    uint64_t intermediate = 3072;
    uint64_t max_sl = 256;
    uint64_t model_vocab = 0;
    std::set<std::string> explicit_model; // fields pinned by config or flags
    // dataset build
    uint64_t min_instructions = 10;
    double train_ratio = 1.0;
    // train
    uint64_t batch = 8;
    double lr = 5e-5;
    uint64_t warmup = 4;
    uint64_t max_steps = 1000;
    uint64_t checkpoint_every = 0;
    std::vector<std::string> tasks = {"alg", "sfp"};
    double mlm_rate = 0.15;
    // search / eval
    uint64_t k = 10;
    std::vector<uint64_t> ks = {1, 10, 50};
    uint64_t vuln_k = 11;
    std::string task = "xcom-O0";
    uint64_t seed = 1;
};

void require_keys(const json& j, const std::string& section,
                  const std::set<std::string>& known) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) {
            fail(kExitValidation, "unknown config key " + section + "." + key);
        }
    }
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_model_key(const json& j, const char* key, uint64_t& out,
                    std::set<std::string>& explicit_model) {
    if (j.contains(key)) {
        out = j.at(key).get<uint64_t>();
        explicit_model.insert(key);
    }
}

void load_config_file(const std::string& path, Settings& s) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitValidation, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(kExitValidation, "bad config file " + path + ": " + e.what());
    }
    if (!j.is_object()) fail(kExitValidation, "config file root must be an object: " + path);
    require_keys(j, "config",
                 {"paths", "tokenizer", "serialization", "model", "dataset_build", "train",
                  "search", "eval", "seed"});

    if (j.contains("paths")) {
        const json& p = j.at("paths");
        require_keys(p, "paths",
                     {"corpus", "vocab", "dataset", "dataset_validation", "run_dir", "checkpoint",
                      "pool", "report", "output", "queries", "targets"});
        read_key(p, "corpus", s.corpus);
        read_key(p, "vocab", s.vocab);
        read_key(p, "dataset", s.dataset);
        read_key(p, "dataset_validation", s.dataset_validation);
        read_key(p, "run_dir", s.run_dir);
        read_key(p, "checkpoint", s.checkpoint);
        read_key(p, "pool", s.pool);
        read_key(p, "report", s.report);
        read_key(p, "output", s.output);
        read_key(p, "queries", s.queries);
        read_key(p, "targets", s.targets);
    }
    if (j.contains("tokenizer")) {
        const json& t = j.at("tokenizer");
        require_keys(t, "tokenizer", {"mode", "vocab_cap"});
        read_key(t, "mode", s.mode);
        read_key(t, "vocab_cap", s.vocab_cap);
    }
    read_key(j, "serialization", s.serialization);
    if (j.contains("model")) {
        const json& m = j.at("model");
        require_keys(m, "model", {"layers", "heads", "hidden", "intermediate", "max_sl", "vocab"});
        read_model_key(m, "layers", s.layers, s.explicit_model);
        read_model_key(m, "heads", s.heads, s.explicit_model);
        read_model_key(m, "hidden", s.hidden, s.explicit_model);
        read_model_key(m, "intermediate", s.intermediate, s.explicit_model);
        read_model_key(m, "max_sl", s.max_sl, s.explicit_model);
        read_model_key(m, "vocab", s.model_vocab, s.explicit_model);
    }
    if (j.contains("dataset_build")) {
        const json& d = j.at("dataset_build");
        require_keys(d, "dataset_build", {"min_instructions", "train_ratio"});
        read_key(d, "min_instructions", s.min_instructions);
        read_key(d, "train_ratio", s.train_ratio);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        require_keys(t, "train",
                     {"batch", "lr", "warmup", "max_steps", "checkpoint_every", "tasks",
                      "mlm_rate", "seed"});
        read_key(t, "batch", s.batch);
        read_key(t, "lr", s.lr);
        read_key(t, "warmup", s.warmup);
        read_key(t, "max_steps", s.max_steps);
        read_key(t, "checkpoint_every", s.checkpoint_every);
        read_key(t, "tasks", s.tasks);
        read_key(t, "mlm_rate", s.mlm_rate);
        read_key(t, "seed", s.seed);
    }
    if (j.contains("search")) {
        const json& q = j.at("search");
        require_keys(q, "search", {"k"});
        read_key(q, "k", s.k);
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        require_keys(e, "eval", {"task", "ks", "vuln_k"});
        read_key(e, "task", s.task);
        read_key(e, "ks", s.ks);
        read_key(e, "vuln_k", s.vuln_k);
    }
    read_key(j, "seed", s.seed);
}

const std::string& require_path(const std::string& value, const char* name, const char* flag) {
    if (value.empty()) {
        fail(kExitValidation,
             std::string("missing required setting ") + name + " (" + flag + ")");
    }
    return value;
}

// Inputs are validated up front so a bad path fails before any work starts.
const std::string& require_input(const std::string& value, const char* name, const char* flag) {
    const std::string& path = require_path(value, name, flag);
    if (!std::filesystem::exists(path)) {
        fail(kExitValidation, "input path does not exist: " + path);
    }
    return path;
}

// Temp file in the destination directory plus rename, so a failed run leaves
// no partial artifact.
void write_file_atomic_cli(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(kExitRuntime, "cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(kExitRuntime, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fail(kExitRuntime, "rename failed for " + target.string() + ": " + ec.message());
}

// Enforces that every explicitly configured model field agrees with the
// checkpoint's embedded config.
void check_model_matches(const Settings& s, uniasm_model* model) {
    if (s.explicit_model.empty()) return;
    char* raw = nullptr;
    check(uniasm_model_config_json(model, &raw), "read model config");
    json actual = json::parse(take_string(raw));
    auto expect = [&](const char* key, uint64_t want) {
        if (!s.explicit_model.count(key)) return;
        uint64_t got = actual.at(key).get<uint64_t>();
        if (got != want) {
            fail(kExitValidation, std::string("config/checkpoint mismatch: model.") + key +
                                      " is " + std::to_string(want) + " in the config but " +
                                      std::to_string(got) + " in the checkpoint");
        }
    };
    expect("layers", s.layers);
    expect("heads", s.heads);
    expect("hidden", s.hidden);
    expect("intermediate", s.intermediate);
    expect("max_sl", s.max_sl);
    expect("vocab", s.model_vocab);
}

int cmd_inspect(const Settings& s) {
    CorpusHandle corpus;
    check(uniasm_corpus_load(require_input(s.corpus, "paths.corpus", "--corpus").c_str(),
                             corpus.out()),
          "load corpus");
    char* raw = nullptr;
    check(uniasm_corpus_stats_json(corpus.get(), &raw), "corpus stats");
    std::cout << take_string(raw) << "\n";
    return kExitOk;
}

int cmd_vocab(const Settings& s) {
    CorpusHandle corpus;
    check(uniasm_corpus_load(require_input(s.corpus, "paths.corpus", "--corpus").c_str(),
                             corpus.out()),
          "load corpus");
    VocabHandle vocab;
    check(uniasm_vocab_build(corpus.get(), s.mode.c_str(), s.serialization.c_str(), s.seed,
                             s.vocab_cap, vocab.out()),
          "build vocabulary");
    const std::string& out_path = require_path(s.vocab, "paths.vocab", "--vocab");
    check(uniasm_vocab_save(vocab.get(), out_path.c_str()), "save vocabulary");
    std::cout << "vocabulary: " << uniasm_vocab_size(vocab.get()) << " tokens -> " << out_path
              << "\n";
    return kExitOk;
}

int cmd_dataset(const Settings& s) {
    CorpusHandle corpus;
    check(uniasm_corpus_load(require_input(s.corpus, "paths.corpus", "--corpus").c_str(),
                             corpus.out()),
          "load corpus");
    const std::string& vocab_path = require_input(s.vocab, "paths.vocab", "--vocab");
    VocabHandle vocab;
    check(uniasm_vocab_load(vocab_path.c_str(), vocab.out()), "load vocabulary");
    char* hash_raw = nullptr;
    check(uniasm_file_fingerprint(vocab_path.c_str(), &hash_raw), "fingerprint vocabulary");
    std::string vocab_hash = take_string(hash_raw);

    DatasetHandle dataset;
    check(uniasm_dataset_build(corpus.get(), vocab.get(), s.mode.c_str(),
                               s.serialization.c_str(), s.max_sl, s.min_instructions, s.seed,
                               dataset.out()),
          "build dataset");
    const std::string& out_path = require_path(s.dataset, "paths.dataset", "--dataset");

    if (s.train_ratio < 1.0) {
        const std::string& validation_path = require_path(
            s.dataset_validation, "paths.dataset_validation", "--dataset-validation");
        DatasetHandle train, validation;
        check(uniasm_dataset_split(dataset.get(), s.train_ratio, s.seed, train.out(),
                                   validation.out()),
              "split dataset");
        check(uniasm_dataset_save(train.get(), out_path.c_str(), vocab_hash.c_str()),
              "save dataset");
        check(uniasm_dataset_save(validation.get(), validation_path.c_str(), vocab_hash.c_str()),
              "save validation dataset");
        std::cout << "dataset: " << uniasm_dataset_size(train.get()) << " train / "
                  << uniasm_dataset_size(validation.get()) << " validation samples -> " << out_path
                  << ", " << validation_path << "\n";
    } else {
        check(uniasm_dataset_save(dataset.get(), out_path.c_str(), vocab_hash.c_str()),
              "save dataset");
        std::cout << "dataset: " << uniasm_dataset_size(dataset.get()) << " samples -> "
                  << out_path << "\n";
    }
    return kExitOk;
}

int cmd_train(const Settings& s) {
    DatasetHandle dataset;
    check(uniasm_dataset_load(require_input(s.dataset, "paths.dataset", "--dataset").c_str(),
                              dataset.out()),
          "load dataset");
    const std::string& vocab_path = require_input(s.vocab, "paths.vocab", "--vocab");
    VocabHandle vocab;
    check(uniasm_vocab_load(vocab_path.c_str(), vocab.out()), "load vocabulary");

    char* header_raw = nullptr;
    check(uniasm_dataset_header_json(dataset.get(), &header_raw), "read dataset header");
    json header = json::parse(take_string(header_raw));
    std::string expected_hash = header.value("vocab_hash", "");
    if (!expected_hash.empty()) {
        char* hash_raw = nullptr;
        check(uniasm_file_fingerprint(vocab_path.c_str(), &hash_raw), "fingerprint vocabulary");
        std::string actual_hash = take_string(hash_raw);
        if (actual_hash != expected_hash) {
            fail(kExitValidation, "vocabulary mismatch: dataset was built against hash " +
                                      expected_hash + " but " + vocab_path + " has " +
                                      actual_hash);
        }
    }

    ModelHandle model;
    if (!s.checkpoint.empty()) {
        if (!std::filesystem::exists(s.checkpoint)) {
            fail(kExitValidation, "input path does not exist: " + s.checkpoint);
        }
        check(uniasm_model_load(s.checkpoint.c_str(), model.out()), "load checkpoint");
        check_model_matches(s, model.get());
    } else {
        uint64_t vocab_rows = s.model_vocab ? s.model_vocab : uniasm_vocab_size(vocab.get());
        check(uniasm_model_init(static_cast<uint32_t>(s.layers), static_cast<uint32_t>(s.heads),
                                static_cast<uint32_t>(s.hidden),
                                static_cast<uint32_t>(s.intermediate),
                                static_cast<uint32_t>(s.max_sl),
                                static_cast<uint32_t>(vocab_rows), s.seed, model.out()),
              "initialize model");
    }

    json train_config = {{"batch", s.batch},
                         {"lr", s.lr},
                         {"warmup", s.warmup},
                         {"max_steps", s.max_steps},
                         {"checkpoint_every", s.checkpoint_every},
                         {"seed", s.seed},
                         {"tasks", s.tasks},
                         {"mlm_rate", s.mlm_rate}};
    char* outcome_raw = nullptr;
    check(uniasm_train(model.get(), dataset.get(), train_config.dump().c_str(),
                       s.run_dir.c_str(), &outcome_raw),
          "train");
    std::cout << take_string(outcome_raw) << "\n";
    return kExitOk;
}

int cmd_embed(const Settings& s) {
    CorpusHandle corpus;
    check(uniasm_corpus_load(require_input(s.corpus, "paths.corpus", "--corpus").c_str(),
                             corpus.out()),
          "load corpus");
    VocabHandle vocab;
    check(uniasm_vocab_load(require_input(s.vocab, "paths.vocab", "--vocab").c_str(), vocab.out()),
          "load vocabulary");
    ModelHandle model;
    check(uniasm_model_load(require_input(s.checkpoint, "paths.checkpoint", "--checkpoint").c_str(),
                            model.out()),
          "load checkpoint");
    check_model_matches(s, model.get());

    PoolHandle pool;
    check(uniasm_embed(model.get(), corpus.get(), vocab.get(), s.mode.c_str(),
                       s.serialization.c_str(), s.seed, pool.out()),
          "embed corpus");
    const std::string& out_path = require_path(s.pool, "paths.pool", "--pool");
    check(uniasm_pool_save(pool.get(), out_path.c_str()), "save pool");
    std::cout << "pool: " << uniasm_pool_size(pool.get()) << " embeddings -> " << out_path << "\n";
    return kExitOk;
}

int cmd_search(const Settings& s) {
    PoolHandle queries, targets;
    check(uniasm_pool_load(require_input(s.queries, "paths.queries", "--queries").c_str(),
                           queries.out()),
          "load query pool");
    check(uniasm_pool_load(require_input(s.targets, "paths.targets", "--targets").c_str(),
                           targets.out()),
          "load target pool");
    char* raw = nullptr;
    check(uniasm_search_topk(queries.get(), targets.get(), s.k, &raw), "search");
    std::string lines = take_string(raw);
    std::cout << lines;
    if (!s.output.empty()) write_file_atomic_cli(s.output, lines);
    return kExitOk;
}

int cmd_eval(const Settings& s) {
    std::string lines;
    if (s.task == "vuln") {
        PoolHandle queries, targets;
        check(uniasm_pool_load(require_input(s.queries, "paths.queries", "--queries").c_str(),
                               queries.out()),
              "load query pool");
        check(uniasm_pool_load(require_input(s.targets, "paths.targets", "--targets").c_str(),
                               targets.out()),
              "load target pool");
        double recall = 0.0;
        check(uniasm_eval_vuln(queries.get(), targets.get(), s.vuln_k, &recall), "evaluate");
        json line = {{"task", "vuln"}, {"k", s.vuln_k}, {"recall", recall}};
        lines = line.dump() + "\n";
    } else {
        PoolHandle pool;
        check(uniasm_pool_load(require_input(s.pool, "paths.pool", "--pool").c_str(), pool.out()),
              "load pool");
        std::vector<uint32_t> ks(s.ks.begin(), s.ks.end());
        if (ks.empty()) fail(kExitValidation, "eval.ks must not be empty");
        char* raw = nullptr;
        check(uniasm_eval_task(pool.get(), s.task.c_str(), ks.data(), ks.size(), &raw),
              "evaluate");
        json report = json::parse(take_string(raw));
        for (const json& entry : report.at("reports")) {
            lines += entry.dump();
            lines += "\n";
        }
    }
    std::cout << lines;
    if (!s.report.empty()) write_file_atomic_cli(s.report, lines);
    return kExitOk;
}

int cmd_export(const Settings& s) {
    PoolHandle pool;
    check(uniasm_pool_load(require_input(s.pool, "paths.pool", "--pool").c_str(), pool.out()),
          "load pool");
    const std::string& out_path = require_path(s.output, "paths.output", "--output");
    check(uniasm_pool_export_tsv(pool.get(), out_path.c_str()), "export pool");
    std::cout << "exported " << uniasm_pool_size(pool.get()) << " embeddings -> " << out_path
              << "\n";
    return kExitOk;
}

struct Flags {
    std::string config;
    std::string corpus, vocab, dataset, dataset_validation, run_dir, checkpoint, pool, report;
    std::string output, queries, targets;
    std::string mode, serialization, task;
    uint64_t vocab_cap = 0, min_instructions = 0, layers = 0, heads = 0, hidden = 0;
    uint64_t intermediate = 0, max_sl = 0, model_vocab = 0, batch = 0, warmup = 0, max_steps = 0;
    uint64_t checkpoint_every = 0, k = 0, vuln_k = 0, seed = 0;
    double lr = 0.0, mlm_rate = 0.0, train_ratio = 0.0;
    std::vector<std::string> tasks;
    std::vector<uint64_t> ks;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file; flags override its values");
    sub->add_option("--corpus", f.corpus, "corpus file (JSON lines)");
    sub->add_option("--vocab", f.vocab, "vocabulary file");
    sub->add_option("--dataset", f.dataset, "dataset file");
    sub->add_option("--dataset-validation", f.dataset_validation, "validation split output");
    sub->add_option("--run-dir", f.run_dir, "training run directory");
    sub->add_option("--checkpoint", f.checkpoint, "model checkpoint file");
    sub->add_option("--pool", f.pool, "embedding pool file");
    sub->add_option("--report", f.report, "evaluation report file");
    sub->add_option("--output", f.output, "output file");
    sub->add_option("--queries", f.queries, "query pool file");
    sub->add_option("--targets", f.targets, "target pool file");
    sub->add_option("--mode", f.mode, "tokenizer mode: full-i, half-i or piece-i");
    sub->add_option("--serialization", f.serialization,
                    "serialization: linear, random-walk or longest-walk");
    sub->add_option("--task", f.task, "evaluation task, e.g. xcom-O0, xopt-gcc-O0-O3, "
                                      "xobf-fla-O1, vuln");
    sub->add_option("--vocab-cap", f.vocab_cap, "vocabulary size cap");
    sub->add_option("--min-instructions", f.min_instructions, "minimum instructions per function");
    sub->add_option("--layers", f.layers, "transformer layers");
    sub->add_option("--heads", f.heads, "attention heads");
    sub->add_option("--hidden", f.hidden, "hidden size");
    sub->add_option("--intermediate", f.intermediate, "feed-forward inner size");
    sub->add_option("--max-sl", f.max_sl, "maximum sequence length");
    sub->add_option("--model-vocab", f.model_vocab,
                    "embedding rows (0 = vocabulary file size)");
    sub->add_option("--batch", f.batch, "batch size");
    sub->add_option("--warmup", f.warmup, "warmup steps");
    sub->add_option("--max-steps", f.max_steps, "training steps");
    sub->add_option("--checkpoint-every", f.checkpoint_every, "periodic checkpoint interval");
    sub->add_option("--k", f.k, "top-k for search");
    sub->add_option("--vuln-k", f.vuln_k, "top-k for the vuln task");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--lr", f.lr, "base learning rate");
    sub->add_option("--mlm-rate", f.mlm_rate, "mask rate for the mlm task");
    sub->add_option("--train-ratio", f.train_ratio, "train split fraction");
    sub->add_option("--tasks", f.tasks, "training tasks: alg, sfp, mlm");
    sub->add_option("--ks", f.ks, "recall cutoffs for eval");
}

void apply_flags(const CLI::App* sub, const Flags& f, Settings& s) {
    auto set = [&](const char* flag, auto& dst, const auto& src) {
        if (sub->count(flag)) dst = src;
    };
    set("--corpus", s.corpus, f.corpus);
    set("--vocab", s.vocab, f.vocab);
    set("--dataset", s.dataset, f.dataset);
    set("--dataset-validation", s.dataset_validation, f.dataset_validation);
    set("--run-dir", s.run_dir, f.run_dir);
    set("--checkpoint", s.checkpoint, f.checkpoint);
    set("--pool", s.pool, f.pool);
    set("--report", s.report, f.report);
    set("--output", s.output, f.output);
    set("--queries", s.queries, f.queries);
    set("--targets", s.targets, f.targets);
    set("--mode", s.mode, f.mode);
    set("--serialization", s.serialization, f.serialization);
    set("--task", s.task, f.task);
    set("--vocab-cap", s.vocab_cap, f.vocab_cap);
    set("--min-instructions", s.min_instructions, f.min_instructions);
    set("--batch", s.batch, f.batch);
    set("--warmup", s.warmup, f.warmup);
    set("--max-steps", s.max_steps, f.max_steps);
    set("--checkpoint-every", s.checkpoint_every, f.checkpoint_every);
    set("--k", s.k, f.k);
    set("--vuln-k", s.vuln_k, f.vuln_k);
    set("--seed", s.seed, f.seed);
    set("--lr", s.lr, f.lr);
    set("--mlm-rate", s.mlm_rate, f.mlm_rate);
    set("--train-ratio", s.train_ratio, f.train_ratio);
    set("--tasks", s.tasks, f.tasks);
    set("--ks", s.ks, f.ks);
    auto set_model = [&](const char* flag, uint64_t& dst, uint64_t src, const char* key) {
        if (sub->count(flag)) {
            dst = src;
            s.explicit_model.insert(key);
        }
    };
    set_model("--layers", s.layers, f.layers, "layers");
    set_model("--heads", s.heads, f.heads, "heads");
    set_model("--hidden", s.hidden, f.hidden, "hidden");
    set_model("--intermediate", s.intermediate, f.intermediate, "intermediate");
    set_model("--max-sl", s.max_sl, f.max_sl, "max_sl");
    set_model("--model-vocab", s.model_vocab, f.model_vocab, "vocab");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary code similarity toolkit"};
    app.require_subcommand(1);

    Flags flags;
    const char* names[] = {"inspect", "vocab", "dataset", "train",
                           "embed",   "search", "eval",   "export"};
    const char* descriptions[] = {
        "validate a corpus and print statistics",
        "build a vocabulary from a corpus",
        "build a training dataset from a corpus and vocabulary",
        "train a model on a dataset",
        "embed a corpus into a pool with a trained model",
        "query a target pool with a query pool, print top-k",
        "run a cross-variant evaluation task over a pool",
        "export a pool as tab-separated text",
    };
    CLI::App* subs[8];
    for (int i = 0; i < 8; ++i) {
        subs[i] = app.add_subcommand(names[i], descriptions[i]);
        add_flags(subs[i], flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        Settings settings;
        if (sub->count("--config")) load_config_file(flags.config, settings);
        apply_flags(sub, flags, settings);

        const std::string name = sub->get_name();
        if (name == "inspect") return cmd_inspect(settings);
        if (name == "vocab") return cmd_vocab(settings);
        if (name == "dataset") return cmd_dataset(settings);
        if (name == "train") return cmd_train(settings);
        if (name == "embed") return cmd_embed(settings);
        if (name == "search") return cmd_search(settings);
        if (name == "eval") return cmd_eval(settings);
        if (name == "export") return cmd_export(settings);
        std::cerr << "error: unknown subcommand " << name << "\n";
        return kExitValidation;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
