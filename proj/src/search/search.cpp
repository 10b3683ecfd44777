#include "search/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

#include "common/errors.hpp"
#include "common/io.hpp"
#include "model/net.hpp"

static_assert(std::endian::native == std::endian::little,
              "pool I/O assumes a little-endian host");

namespace uniasm {

VariantKey TaskSpec::source_variant() const {
    switch (kind) {
        case TaskKind::XCom: return {Compiler::Gcc, opt, Obfuscation::None};
        case TaskKind::XOpt: return {compiler, opt_src, Obfuscation::None};
        case TaskKind::XObf: return {Compiler::Ollvm, opt, Obfuscation::None};
    }
    throw RuntimeFault("task kind out of range");
}

VariantKey TaskSpec::target_variant() const {
    switch (kind) {
        case TaskKind::XCom: return {Compiler::Clang, opt, Obfuscation::None};
        case TaskKind::XOpt: return {compiler, opt_dst, Obfuscation::None};
        case TaskKind::XObf: return {Compiler::Ollvm, opt, obf};
    }
    throw RuntimeFault("task kind out of range");
}

std::string TaskSpec::name() const {
    switch (kind) {
        case TaskKind::XCom: return "xcom-" + to_string(opt);
        case TaskKind::XOpt:
            return "xopt-" + to_string(compiler) + "-" + to_string(opt_src) + "-" +
                   to_string(opt_dst);
        case TaskKind::XObf: return "xobf-" + to_string(obf) + "-" + to_string(opt);
    }
    throw RuntimeFault("task kind out of range");
}

// "xcom-O0" | "xopt-gcc-O0-O3" | "xobf-fla-O1"
TaskSpec task_from_string(const std::string& s) {
    std::vector<std::string> parts;
    size_t at = 0;
    while (at <= s.size()) {
        size_t dash = s.find('-', at);
        if (dash == std::string::npos) {
            parts.push_back(s.substr(at));
            break;
        }
        parts.push_back(s.substr(at, dash - at));
        at = dash + 1;
    }

    TaskSpec t;
    if (parts.size() == 2 && parts[0] == "xcom") {
        t.kind = TaskKind::XCom;
        t.opt = opt_from_string(parts[1]);
        return t;
    }
    if (parts.size() == 4 && parts[0] == "xopt") {
        t.kind = TaskKind::XOpt;
        t.compiler = compiler_from_string(parts[1]);
        t.opt_src = opt_from_string(parts[2]);
        t.opt_dst = opt_from_string(parts[3]);
        return t;
    }
    if (parts.size() == 3 && parts[0] == "xobf") {
        t.kind = TaskKind::XObf;
        t.obf = obf_from_string(parts[1]);
        if (t.obf == Obfuscation::None) throw ValidationError("xobf task needs an obfuscation");
        t.opt = opt_from_string(parts[2]);
        return t;
    }
    throw ValidationError("unknown task spec: '" + s + "'");
}

Vec<float> embed_function(const Function& f, const Parameters<float>& params,
                          const Vocabulary& vocab, TokenizerMode mode,
                          Serialization serialization, uint64_t seed) {
    if (f.instructions.empty()) {
        throw ValidationError("cannot embed empty function " + f.name);
    }
    std::vector<std::string> tokens = function_tokens(f, mode, serialization, seed);
    PackedSequence packed = pack_single(tokens, vocab, params.config.max_sl);
    Mat<float> mask = build_mask<float>(packed.len_first, 0, packed.ids.size(),
                                        MaskMode::Bidirectional);
    Mat<float> h = forward<float>(packed.ids, packed.segments, mask, params, nullptr);
    Vec<float> h_cls = h.row(0).transpose();
    return function_embedding(h_cls, params);
}

EmbeddingPool build_pool(const std::vector<Function>& corpus, const Parameters<float>& params,
                         const Vocabulary& vocab, TokenizerMode mode, Serialization serialization,
                         uint64_t seed) {
    if (vocab.mode() != mode) {
        throw ValidationError("tokenizer mode " + to_string(mode) +
                              " does not match vocabulary mode " + to_string(vocab.mode()));
    }
    EmbeddingPool pool;
    pool.matrix.resize(static_cast<Eigen::Index>(corpus.size()), params.ex.cols());
    pool.labels.reserve(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        Vec<float> v = embed_function(corpus[i], params, vocab, mode, serialization, seed);
        pool.matrix.row(static_cast<Eigen::Index>(i)) = v.transpose();
        pool.labels.push_back({corpus[i].project, corpus[i].name, corpus[i].key});
    }
    return pool;
}

namespace {

double cosine_or_floor(const Eigen::VectorXd& query, double query_norm,
                       const Eigen::VectorXd& row) {
    double row_norm = row.norm();
    if (query_norm == 0.0 || row_norm == 0.0) return -1.0;
    return query.dot(row) / (query_norm * row_norm);
}

std::vector<double> score_all(const Vec<float>& query, const EmbeddingPool& pool) {
    if (pool.size() == 0) throw ValidationError("empty embedding pool");
    if (pool.matrix.cols() != query.size()) {
        throw ValidationError("query dimension does not match the pool");
    }
    Eigen::VectorXd q = query.cast<double>();
    double qn = q.norm();
    std::vector<double> scores(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
        Eigen::VectorXd row = pool.matrix.row(static_cast<Eigen::Index>(i)).cast<double>();
        scores[i] = cosine_or_floor(q, qn, row);
    }
    return scores;
}

// 1-based rank under the (score desc, index asc) order.
size_t rank_of(const std::vector<double>& scores, size_t target) {
    size_t better = 0;
    for (size_t j = 0; j < scores.size(); ++j) {
        if (scores[j] > scores[target] || (scores[j] == scores[target] && j < target)) ++better;
    }
    return better + 1;
}

} // namespace

std::vector<ScoredHit> cosine_topk(const Vec<float>& query, const EmbeddingPool& pool, size_t k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    std::vector<double> scores = score_all(query, pool);

    std::vector<size_t> idx(pool.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    size_t take = std::min(k, idx.size());
    std::vector<ScoredHit> out(take);
    for (size_t i = 0; i < take; ++i) out[i] = {idx[i], scores[idx[i]]};
    return out;
}

RecallReport recall_at_k(const EmbeddingPool& queries, const EmbeddingPool& targets,
                         const std::vector<size_t>& ground_truth, size_t k,
                         const std::string& task_name) {
    if (queries.size() == 0) throw ValidationError("empty query pool");
    if (k == 0) throw ValidationError("recall needs k >= 1");
    if (ground_truth.size() != queries.size()) {
        throw ValidationError("ground truth missing for query " +
                              std::to_string(ground_truth.size()));
    }
    for (size_t i = 0; i < ground_truth.size(); ++i) {
        if (ground_truth[i] >= targets.size()) {
            throw ValidationError("ground truth out of range for query " + std::to_string(i));
        }
    }

    RecallReport report;
    report.task = task_name;
    report.k = k;
    report.pool_size = targets.size();
    report.ranks.resize(queries.size());

    size_t hits = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
        Vec<float> q = queries.matrix.row(static_cast<Eigen::Index>(i)).transpose();
        std::vector<double> scores = score_all(q, targets);
        size_t rank = rank_of(scores, ground_truth[i]);
        report.ranks[i] = rank;
        if (rank <= k) ++hits;
    }
    report.recall = static_cast<double>(hits) / static_cast<double>(queries.size());
    return report;
}

TaskPools build_task_pools(const EmbeddingPool& corpus_pool, const TaskSpec& task) {
    VariantKey src_key = task.source_variant();
    VariantKey dst_key = task.target_variant();
    if (src_key == dst_key) throw ValidationError("task source and target variants coincide");

    std::map<std::pair<std::string, std::string>, size_t> src_rows;
    std::map<std::pair<std::string, std::string>, size_t> dst_rows;
    for (size_t i = 0; i < corpus_pool.size(); ++i) {
        const PoolLabel& label = corpus_pool.labels[i];
        auto identity = std::make_pair(label.project, label.func_name);
        if (label.key == src_key) src_rows[identity] = i;
        if (label.key == dst_key) dst_rows[identity] = i;
    }

    TaskPools out;
    std::vector<std::pair<size_t, size_t>> matched;
    for (const auto& [identity, src_row] : src_rows) {
        auto it = dst_rows.find(identity);
        if (it != dst_rows.end()) matched.emplace_back(src_row, it->second);
    }
    if (matched.empty()) {
        throw ValidationError("no functions shared between " + to_string(src_key) + " and " +
                              to_string(dst_key));
    }

    Eigen::Index d = corpus_pool.matrix.cols();
    out.source.matrix.resize(static_cast<Eigen::Index>(matched.size()), d);
    out.target.matrix.resize(static_cast<Eigen::Index>(matched.size()), d);
    for (size_t i = 0; i < matched.size(); ++i) {
        out.source.matrix.row(static_cast<Eigen::Index>(i)) =
            corpus_pool.matrix.row(static_cast<Eigen::Index>(matched[i].first));
        out.source.labels.push_back(corpus_pool.labels[matched[i].first]);
        out.target.matrix.row(static_cast<Eigen::Index>(i)) =
            corpus_pool.matrix.row(static_cast<Eigen::Index>(matched[i].second));
        out.target.labels.push_back(corpus_pool.labels[matched[i].second]);
        out.ground_truth.push_back(i);
    }
    return out;
}

double vuln_search(const EmbeddingPool& queries, const EmbeddingPool& targets, size_t k) {
    if (queries.size() == 0) throw ValidationError("empty vulnerability query pool");
    double v = static_cast<double>(queries.size());

    double sum = 0.0;
    for (size_t i = 0; i < queries.size(); ++i) {
        Vec<float> q = queries.matrix.row(static_cast<Eigen::Index>(i)).transpose();
        std::vector<ScoredHit> top = cosine_topk(q, targets, k);
        size_t found = 0;
        for (const ScoredHit& hit : top) {
            const PoolLabel& label = targets.labels[hit.index];
            if (label.project == queries.labels[i].project &&
                label.func_name == queries.labels[i].func_name) {
                ++found;
            }
        }
        sum += static_cast<double>(found) / v;
    }
    return sum / static_cast<double>(queries.size());
}

namespace {

constexpr char kPoolMagic[4] = {'U', 'A', 'P', 'L'};
constexpr uint32_t kPoolVersion = 1;
// Label encoding 1: utf-8 "project\tfunc_name\tvariant" per row.
constexpr uint32_t kLabelEncoding = 1;

} // namespace

void save_pool(const std::string& path, const EmbeddingPool& pool) {
    if (pool.labels.size() != static_cast<size_t>(pool.matrix.rows())) {
        throw ValidationError("pool row/label count mismatch");
    }
    std::string out;
    out.append(kPoolMagic, sizeof kPoolMagic);
    auto put_u32 = [&](uint32_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
    auto put_u64 = [&](uint64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put_u32(kPoolVersion);
    put_u64(pool.labels.size());
    put_u32(static_cast<uint32_t>(pool.matrix.cols()));
    put_u32(kLabelEncoding);
    out.append(reinterpret_cast<const char*>(pool.matrix.data()),
               static_cast<size_t>(pool.matrix.size()) * sizeof(float));
    for (const PoolLabel& label : pool.labels) {
        std::string row = label.project + "\t" + label.func_name + "\t" + to_string(label.key);
        put_u32(static_cast<uint32_t>(row.size()));
        out.append(row);
    }
    write_file_atomic(path, out);
}

EmbeddingPool load_pool(const std::string& path) {
    std::string data = read_file(path);
    size_t pos = 0;
    auto need = [&](size_t n) {
        if (data.size() - pos < n) throw ValidationError("truncated pool file: " + path);
    };
    auto get_u32 = [&]() {
        need(4);
        uint32_t v;
        std::memcpy(&v, data.data() + pos, 4);
        pos += 4;
        return v;
    };
    auto get_u64 = [&]() {
        need(8);
        uint64_t v;
        std::memcpy(&v, data.data() + pos, 8);
        pos += 8;
        return v;
    };

    need(4);
    if (std::memcmp(data.data(), kPoolMagic, 4) != 0) {
        throw ValidationError("not an embedding pool file: " + path);
    }
    pos += 4;
    if (get_u32() != kPoolVersion) throw ValidationError("unsupported pool version: " + path);
    uint64_t count = get_u64();
    uint32_t d = get_u32();
    if (get_u32() != kLabelEncoding) throw ValidationError("unknown pool label encoding: " + path);

    EmbeddingPool pool;
    pool.matrix.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
    size_t bytes = static_cast<size_t>(count) * d * sizeof(float);
    need(bytes);
    std::memcpy(pool.matrix.data(), data.data() + pos, bytes);
    pos += bytes;

    pool.labels.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        uint32_t len = get_u32();
        need(len);
        std::string row = data.substr(pos, len);
        pos += len;
        size_t t1 = row.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : row.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw ValidationError("malformed pool label: " + row);
        PoolLabel label;
        label.project = row.substr(0, t1);
        label.func_name = row.substr(t1 + 1, t2 - t1 - 1);
        label.key = variant_from_string(row.substr(t2 + 1));
        pool.labels.push_back(std::move(label));
    }
    if (pos != data.size()) throw ValidationError("trailing bytes in pool file: " + path);
    return pool;
}

void export_pool_tsv(const std::string& path, const EmbeddingPool& pool) {
    std::ostringstream out;
    out << "project\tfunc\tvariant";
    for (Eigen::Index c = 0; c < pool.matrix.cols(); ++c) out << "\te" << c;
    out << "\n";
    out.precision(9);
    for (size_t i = 0; i < pool.size(); ++i) {
        const PoolLabel& label = pool.labels[i];
        out << label.project << "\t" << label.func_name << "\t" << to_string(label.key);
        for (Eigen::Index c = 0; c < pool.matrix.cols(); ++c) {
            out << "\t" << pool.matrix(static_cast<Eigen::Index>(i), c);
        }
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

} // namespace uniasm
