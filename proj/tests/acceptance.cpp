// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and budgets are pinned here, next to each check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset/dataset.hpp"
#include "frontend/normalize.hpp"
#include "frontend/serialize.hpp"
#include "helpers.hpp"
#include "model/checkpoint.hpp"
#include "model/net.hpp"
#include "model/params.hpp"
#include "search/search.hpp"
#include "tokenizer/tokenizer.hpp"
#include "tokenizer/vocab.hpp"
#include "train/losses.hpp"
#include "train/trainer.hpp"

using namespace uniasm;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ModelConfig grad_config() {
    ModelConfig c;
    c.layers = 2;
    c.heads = 2;
    c.hidden = 16;
    c.intermediate = 32;
    c.max_sl = 16;
    c.vocab = 50;
    return c;
}

PackedSequence make_packed(uint32_t len_first, uint32_t len_second, int32_t base) {
    PackedSequence s;
    s.ids.push_back(kClsId);
    for (uint32_t i = 0; i < len_first; ++i) s.ids.push_back(base + static_cast<int32_t>(i));
    s.ids.push_back(kSepId);
    size_t prefix = s.ids.size();
    if (len_second) {
        for (uint32_t i = 0; i < len_second; ++i) {
            s.ids.push_back(base + 10 + static_cast<int32_t>(i));
        }
        s.ids.push_back(kSepId);
    }
    s.segments.assign(s.ids.size(), 1);
    for (size_t i = 0; i < prefix; ++i) s.segments[i] = 0;
    s.len_first = len_first;
    s.len_second = len_second;
    return s;
}

// 1: joint generation+contrastive gradients vs central finite differences.
bool check_gradients(std::string& detail) {
    const double kEps = 1e-4;
    const double kTol = 1e-3;
    const size_t kMinCoords = 100;
    const double kBudgetSeconds = 60.0;

    auto start = std::chrono::steady_clock::now();
    Parameters<double> params = init_parameters<double>(grad_config(), 17);
    PackedSequence a = make_packed(5, 6, 10);
    PackedSequence b = make_packed(6, 5, 20);
    std::vector<const PackedSequence*> batch = {&a, &b};

    Parameters<double> grads = zeros_like(params);
    joint_loss<double>(batch, params, true, true, &grads);
    auto loss_at = [&]() { return joint_loss<double>(batch, params, true, true, nullptr).total; };

    auto param_buffers = tensor_buffers(params);
    auto grad_buffers = tensor_buffers(grads);
    size_t total_coords = 0;
    for (const auto& [ptr, n] : param_buffers) {
        (void)ptr;
        total_coords += n;
    }

    std::mt19937_64 rng(123);
    double max_rel = 0.0;
    size_t checked = 0;
    for (size_t sample = 0; sample < 120; ++sample) {
        size_t flat = rng() % total_coords;
        size_t tensor = 0;
        while (flat >= param_buffers[tensor].second) {
            flat -= param_buffers[tensor].second;
            ++tensor;
        }
        double* coord = param_buffers[tensor].first + flat;
        double saved = *coord;
        *coord = saved + kEps;
        double up = loss_at();
        *coord = saved - kEps;
        double down = loss_at();
        *coord = saved;
        double fd = (up - down) / (2 * kEps);
        double analytic = grad_buffers[tensor].first[flat];
        double rel =
            std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-8});
        max_rel = std::max(max_rel, rel);
        ++checked;
    }
    double elapsed = seconds_since(start);
    std::ostringstream out;
    out << checked << " coordinates, max relative error " << max_rel << ", " << elapsed << " s";
    detail = out.str();
    return checked >= kMinCoords && max_rel < kTol && elapsed < kBudgetSeconds;
}

// 2: generation mask equals the cell-by-cell law on random shapes.
bool check_mask_law(std::string& detail) {
    std::mt19937_64 rng(42);
    size_t cells = 0;
    for (int trial = 0; trial < 50; ++trial) {
        size_t len_first = 1 + rng() % 6;
        size_t len_second = rng() % 5;
        size_t prefix = len_first + 2;
        size_t second = len_second ? len_second + 1 : 0;
        size_t packed = prefix + second;
        size_t total = packed + rng() % 4;
        Mat<double> m = build_mask<double>(len_first, len_second, total, MaskMode::Alg);
        for (size_t i = 0; i < total; ++i) {
            for (size_t j = 0; j < total; ++j) {
                double want;
                if (i >= packed || j >= packed) {
                    want = kMaskBlocked<double>;
                } else if (i < prefix) {
                    want = j < prefix ? 0.0 : kMaskBlocked<double>;
                } else {
                    want = j <= i ? 0.0 : kMaskBlocked<double>;
                }
                if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != want) {
                    std::ostringstream out;
                    out << "mismatch at (" << i << "," << j << ") for lens (" << len_first << ","
                        << len_second << "," << total << ")";
                    detail = out.str();
                    return false;
                }
                ++cells;
            }
        }
    }
    detail = "50 random (len_first, len_second, padding) triples, " + std::to_string(cells) +
             " cells, exact equality";
    return true;
}

// 3: perturbing a target token leaves earlier rows bitwise unchanged.
bool check_causality(std::string& detail) {
    Parameters<double> p = init_parameters<double>(grad_config(), 5);
    std::vector<int32_t> ids = {kClsId, 6, 7, 8, 9, kSepId, 30, 31, 32, 33, 34, kSepId};
    std::vector<int8_t> segments = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    Mat<double> mask = build_mask<double>(4, 5, ids.size(), MaskMode::Alg);
    Mat<double> base = forward<double>(ids, segments, mask, p);

    size_t cells = 0;
    for (size_t perturb = 7; perturb < 11; ++perturb) {
        std::vector<int32_t> changed = ids;
        changed[perturb] = 42;
        Mat<double> out = forward<double>(changed, segments, mask, p);
        for (size_t i = 0; i < perturb; ++i) {
            for (int c = 0; c < 16; ++c) {
                double diff = out(static_cast<Eigen::Index>(i), c) -
                              base(static_cast<Eigen::Index>(i), c);
                if (diff != 0.0) {
                    std::ostringstream msg;
                    msg << "row " << i << " changed by " << diff << " when token " << perturb
                        << " was perturbed";
                    detail = msg.str();
                    return false;
                }
                ++cells;
            }
        }
    }
    detail = "4 perturbation sites, " + std::to_string(cells) + " earlier cells, all exact zero";
    return true;
}

// 4: contrastive loss closed forms.
bool check_sfp_exactness(std::string& detail) {
    const double kTol = 1e-6;
    Mat<double> two(2, 4);
    two << 0.3, -1.2, 0.7, 2.0, -0.5, 0.1, 0.9, -2.3;
    double loss2 = sfp_from_embeddings<double>(two, nullptr);
    if (loss2 != 0.0) {
        detail = "pair batch loss " + std::to_string(loss2) + " is not exactly zero";
        return false;
    }

    Mat<double> four = Mat<double>::Zero(4, 6);
    four(0, 0) = 2.0;
    four(1, 0) = 2.0;
    four(2, 3) = 0.5;
    four(3, 3) = 0.5;
    double loss4 = sfp_from_embeddings<double>(four, nullptr);
    double expect = -std::log(std::exp(1.0) / (std::exp(1.0) + 2.0));
    double err = std::abs(loss4 - expect);
    std::ostringstream out;
    out << "pair batch exactly 0; orthogonal quad " << loss4 << " vs -ln(e/(e+2)) " << expect
        << ", |err| " << err;
    detail = out.str();
    return err < kTol;
}

// 5: the similar-pair grid over a fully populated variant set.
bool check_pair_grid(std::string& detail) {
    std::vector<VariantKey> keys;
    for (auto opt : {OptLevel::O0, OptLevel::O1, OptLevel::O2, OptLevel::O3}) {
        keys.push_back({Compiler::Gcc, opt, Obfuscation::None});
        keys.push_back({Compiler::Clang, opt, Obfuscation::None});
        for (auto obf :
             {Obfuscation::None, Obfuscation::Sub, Obfuscation::Fla, Obfuscation::Bcf}) {
            keys.push_back({Compiler::Ollvm, opt, obf});
        }
    }
    auto pairs = enumerate_pairs(keys);

    size_t gcc_same = 0, clang_same = 0, cross = 0, sub = 0, fla = 0, bcf = 0;
    for (const auto& [a, b] : pairs) {
        if (a.compiler == Compiler::Gcc && b.compiler == Compiler::Gcc) ++gcc_same;
        else if (a.compiler == Compiler::Clang && b.compiler == Compiler::Clang) ++clang_same;
        else if (a.compiler != Compiler::Ollvm && b.compiler != Compiler::Ollvm) ++cross;
        else if (b.obf == Obfuscation::Sub) ++sub;
        else if (b.obf == Obfuscation::Fla) ++fla;
        else if (b.obf == Obfuscation::Bcf) ++bcf;
    }

    PairSample sample;
    sample.first = {"a"};
    sample.second = {"b"};
    size_t doubled = augment_swap(std::vector<PairSample>(pairs.size(), sample)).size();

    std::ostringstream out;
    out << pairs.size() << " pairs (" << doubled << " after swap), cells " << gcc_same << "/"
        << cross << "/" << clang_same << "/" << sub << "/" << fla << "/" << bcf;
    detail = out.str();
    return pairs.size() == 40 && doubled == 80 && gcc_same == 6 && cross == 16 &&
           clang_same == 6 && sub == 4 && fla == 4 && bcf == 4;
}

// 6: tokenizer granularity fixtures, bit-exact.
bool check_tokenizer_fixtures(std::string& detail) {
    bool ok = tokenize_instruction("mov rax, NUM", TokenizerMode::Full) ==
                  std::vector<std::string>{"mov_rax_NUM"} &&
              tokenize_instruction("mov rax, [rbx+NUM]", TokenizerMode::Half) ==
                  std::vector<std::string>{"mov", "rax_[rbx+NUM]"} &&
              tokenize_instruction("mov rax, [rbx+NUM]", TokenizerMode::Piece) ==
                  std::vector<std::string>{"mov", "rax", "rbx", "NUM"};
    detail = ok ? "whole-instruction, opcode+operands and per-word fixtures bit-exact"
                : "a granularity fixture diverged";
    return ok;
}

// 7: normalizer rules, each with an exact expected rewrite, plus idempotence.
bool check_normalizer(std::string& detail) {
    const std::vector<std::pair<std::string, std::string>> rules = {
        {"mov rax, [rip+0x2ef2]", "mov rax, PTR"},      // rip-relative
        {"mov qword ptr [rsp+0x8], rdi", "mov SSP, rdi"}, // stack pointer
        {"mov dword ptr [rbp-0x4], edi", "mov SBP, edi"}, // base pointer
        {"mov rax, [rbx+0x10]", "mov rax, MEM"},        // other memory
        {"call 0x401000", "call REL"},                  // direct call/branch
        {"mov rax, 0x1f", "mov rax, NUM"},              // immediate
        {"movaps xmm0, xmm1", "movaps XMM, XMM"},       // vector registers
        {"jne 0x400800", "cjmp REL"},                   // conditional jump
    };
    for (const auto& [input, want] : rules) {
        std::string got = normalize_instruction(input);
        if (got != want) {
            detail = "'" + input + "' -> '" + got + "', wanted '" + want + "'";
            return false;
        }
    }

    std::vector<std::string> fixture_corpus;
    for (const auto& [input, want] : rules) fixture_corpus.push_back(input);
    for (const auto& extra :
         {"jmp 0x400500", "loop 0x400100", "ret", "push rbp", "lea rax, [rdi+rsi*4]",
          "add eax, 5", "vmulpd zmm0, zmm1, zmm2", "mov    rax,0x10"}) {
        fixture_corpus.push_back(extra);
    }
    for (const auto& text : fixture_corpus) {
        std::string once = normalize_instruction(text);
        std::string twice = normalize_instruction(once);
        if (once != twice) {
            detail = "not idempotent on '" + text + "': '" + once + "' -> '" + twice + "'";
            return false;
        }
    }
    detail = "8 rewrite rules exact, idempotent over " +
             std::to_string(fixture_corpus.size()) + " fixtures";
    return true;
}

// 8: ranking equality against an exhaustive double-precision oracle.
bool check_search_oracle(std::string& detail) {
    const double kBudgetSeconds = 10.0;
    auto start = std::chrono::steady_clock::now();

    const size_t n = 1000, d = 32, query_count = 50;
    std::mt19937_64 rng(314159);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    EmbeddingPool pool;
    pool.matrix.resize(n, d);
    for (size_t r = 0; r < n; ++r) {
        pool.labels.push_back(
            PoolLabel{"p", "f" + std::to_string(r), variant_from_string("gcc-O0")});
        for (size_t c = 0; c < d; ++c) {
            pool.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = gauss(rng);
        }
    }

    for (size_t qi = 0; qi < query_count; ++qi) {
        size_t row = qi * 19 % n;
        Vec<float> q = pool.matrix.row(static_cast<Eigen::Index>(row)).transpose();
        auto hits = cosine_topk(q, pool, n);

        std::vector<std::pair<double, size_t>> oracle(n);
        for (size_t r = 0; r < n; ++r) {
            double dot = 0.0, nq = 0.0, nr = 0.0;
            for (size_t c = 0; c < d; ++c) {
                double qc = q(static_cast<Eigen::Index>(c));
                double rc = pool.matrix(static_cast<Eigen::Index>(r),
                                        static_cast<Eigen::Index>(c));
                dot += qc * rc;
                nq += qc * qc;
                nr += rc * rc;
            }
            double score = (nq == 0.0 || nr == 0.0) ? -1.0 : dot / (std::sqrt(nq) * std::sqrt(nr));
            oracle[r] = {score, r};
        }
        std::stable_sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (size_t r = 0; r < n; ++r) {
            if (hits[r].index != oracle[r].second) {
                std::ostringstream msg;
                msg << "query " << row << " rank " << r << ": got pool row " << hits[r].index
                    << ", oracle says " << oracle[r].second;
                detail = msg.str();
                return false;
            }
        }

        // recall_at_k must agree with the oracle rank of the query row itself.
        EmbeddingPool one;
        one.matrix = q.transpose();
        one.labels = {pool.labels[row]};
        RecallReport report = recall_at_k(one, pool, {row}, 1, "oracle");
        size_t oracle_rank = 0;
        for (size_t r = 0; r < n; ++r) {
            if (oracle[r].second == row) oracle_rank = r + 1;
        }
        if (report.ranks[0] != oracle_rank) {
            detail = "recall_at_k rank disagrees with the oracle";
            return false;
        }
    }
    double elapsed = seconds_since(start);
    std::ostringstream out;
    out << query_count << " queries over " << n << "x" << d
        << " pool, exact ranking equality, " << elapsed << " s";
    detail = out.str();
    return elapsed < kBudgetSeconds;
}

// 9: desk-scale overfit: Recall@1 >= 0.95 on the training pairs.
bool check_overfit(std::string& detail) {
    const double kTargetRecall = 0.95;
    const uint64_t kMaxSteps = 2000;
    const double kBudgetSeconds = 600.0;
    auto start = std::chrono::steady_clock::now();

    auto corpus = testutil::synth_corpus(50, {"gcc-O0", "clang-O0"}, 2024);
    std::unordered_map<std::string, uint64_t> freq;
    for (const auto& f : corpus) {
        count_tokens(function_tokens(f, TokenizerMode::Full, Serialization::Linear, 0), freq);
    }
    TokenizerConfig tc;
    tc.vocab_cap = 4096;
    Vocabulary vocab = Vocabulary::build(freq, tc);

    DatasetBuildConfig dc;
    dc.max_sl = 64;
    dc.min_instructions = 10;
    auto records = build_dataset(corpus, vocab, dc);
    if (records.size() != 100) {
        detail = "expected 100 records (50 pairs and their swaps), got " +
                 std::to_string(records.size());
        return false;
    }

    ModelConfig mc;
    mc.layers = 1;
    mc.heads = 4;
    mc.hidden = 32;
    mc.intermediate = 64;
    mc.max_sl = 64;
    mc.vocab = static_cast<uint32_t>(vocab.size());
    Parameters<float> params = init_parameters<float>(mc, 7);

    testutil::TempDir tmp;
    TrainConfig trc;
    trc.batch = 8;
    trc.lr = 1e-3;
    trc.warmup = 20;
    trc.seed = 5;
    trc.task_alg = true;
    trc.task_sfp = true;

    uint64_t steps_done = 0;
    double recall = 0.0;
    for (int round = 1; round <= 4 && steps_done < kMaxSteps; ++round) {
        trc.max_steps = 500;
        train_loop(records, params, trc, tmp.str("round" + std::to_string(round)));
        steps_done += 500;

        EmbeddingPool pool =
            build_pool(corpus, params, vocab, TokenizerMode::Full, Serialization::Linear, 0);
        TaskPools pools = build_task_pools(pool, task_from_string("xcom-O0"));
        RecallReport report =
            recall_at_k(pools.source, pools.target, pools.ground_truth, 1, "xcom-O0");
        recall = report.recall;
        if (recall >= kTargetRecall) break;
    }

    double elapsed = seconds_since(start);
    std::ostringstream out;
    out << "Recall@1 " << recall << " after " << steps_done << " steps on 50 training pairs, "
        << elapsed << " s";
    detail = out.str();
    return recall >= kTargetRecall && steps_done <= kMaxSteps && elapsed < kBudgetSeconds;
}

// 10: determinism and bit-exact round-trips.
bool check_determinism(std::string& detail) {
    testutil::TempDir tmp;
    auto corpus = testutil::synth_corpus(6, {"gcc-O0", "clang-O0"}, 55);
    std::unordered_map<std::string, uint64_t> freq;
    for (const auto& f : corpus) {
        count_tokens(function_tokens(f, TokenizerMode::Full, Serialization::Linear, 0), freq);
    }
    TokenizerConfig tc;
    tc.vocab_cap = 4096;
    Vocabulary vocab = Vocabulary::build(freq, tc);
    DatasetBuildConfig dc;
    dc.max_sl = 64;
    auto records = build_dataset(corpus, vocab, dc);

    ModelConfig mc;
    mc.layers = 1;
    mc.heads = 2;
    mc.hidden = 16;
    mc.intermediate = 32;
    mc.max_sl = 64;
    mc.vocab = static_cast<uint32_t>(vocab.size());

    TrainConfig trc;
    trc.batch = 4;
    trc.lr = 1e-3;
    trc.warmup = 2;
    trc.max_steps = 6;
    trc.seed = 13;

    Parameters<float> p1 = init_parameters<float>(mc, 3);
    TrainOutcome o1 = train_loop(records, p1, trc, tmp.str("a"));
    Parameters<float> p2 = init_parameters<float>(mc, 3);
    TrainOutcome o2 = train_loop(records, p2, trc, tmp.str("b"));

    std::string ck1 = testutil::read_text_file(o1.final_checkpoint);
    std::string ck2 = testutil::read_text_file(o2.final_checkpoint);
    if (ck1.empty() || ck1 != ck2) {
        detail = "repeated training produced different checkpoints";
        return false;
    }
    if (testutil::read_text_file(tmp.str("a/metrics.jsonl")) !=
        testutil::read_text_file(tmp.str("b/metrics.jsonl"))) {
        detail = "repeated training produced different metrics";
        return false;
    }

    // Checkpoint round-trip: load and resave bit-exactly.
    Parameters<float> reloaded = load_checkpoint(o1.final_checkpoint);
    save_checkpoint(tmp.str("resaved.uasm"), reloaded);
    if (testutil::read_text_file(tmp.str("resaved.uasm")) != ck1) {
        detail = "checkpoint round-trip changed bytes";
        return false;
    }

    // Embedding pools: identical across runs and across file round-trips.
    EmbeddingPool pool1 =
        build_pool(corpus, p1, vocab, TokenizerMode::Full, Serialization::Linear, 0);
    EmbeddingPool pool2 =
        build_pool(corpus, p2, vocab, TokenizerMode::Full, Serialization::Linear, 0);
    for (Eigen::Index r = 0; r < pool1.matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < pool1.matrix.cols(); ++c) {
            if (pool1.matrix(r, c) != pool2.matrix(r, c)) {
                detail = "repeated embedding produced different vectors";
                return false;
            }
        }
    }
    save_pool(tmp.str("p1.uapl"), pool1);
    EmbeddingPool pool_loaded = load_pool(tmp.str("p1.uapl"));
    save_pool(tmp.str("p2.uapl"), pool_loaded);
    if (testutil::read_text_file(tmp.str("p1.uapl")) !=
        testutil::read_text_file(tmp.str("p2.uapl"))) {
        detail = "pool round-trip changed bytes";
        return false;
    }

    // Evaluation reports repeat exactly.
    TaskPools pools1 = build_task_pools(pool1, task_from_string("xcom-O0"));
    TaskPools pools2 = build_task_pools(pool2, task_from_string("xcom-O0"));
    RecallReport r1 = recall_at_k(pools1.source, pools1.target, pools1.ground_truth, 1, "t");
    RecallReport r2 = recall_at_k(pools2.source, pools2.target, pools2.ground_truth, 1, "t");
    if (r1.recall != r2.recall || r1.ranks != r2.ranks) {
        detail = "repeated evaluation produced different reports";
        return false;
    }

    detail = "bit-identical checkpoints and pools, identical eval reports, exact round-trips";
    return true;
}

// 11: serialization properties, with full path enumeration as the oracle.
void enumerate_paths(size_t at, const std::vector<std::vector<size_t>>& adj,
                     std::vector<size_t>& path, std::vector<std::vector<size_t>>& out) {
    path.push_back(at);
    if (adj[at].empty()) {
        out.push_back(path);
    } else {
        for (size_t next : adj[at]) enumerate_paths(next, adj, path, out);
    }
    path.pop_back();
}

bool check_serialization(std::string& detail) {
    // Linear order is address order.
    Function flat = testutil::make_function("p", "f", "gcc-O0", {"i0", "i1", "i2", "i3"});
    if (serialize_linear(flat) != std::vector<std::string>{"i0", "i1", "i2", "i3"}) {
        detail = "linear order diverged from address order";
        return false;
    }

    // Random walks are valid entry-rooted paths on a branchy (cyclic) CFG.
    std::vector<size_t> sizes = {2, 3, 1, 2, 4, 1};
    std::vector<std::pair<size_t, size_t>> edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3},
                                                    {3, 1}, {3, 4}, {4, 5}};
    Function cyclic = testutil::make_cfg_function(sizes, edges);
    std::set<std::pair<size_t, size_t>> edge_set(edges.begin(), edges.end());
    for (uint64_t seed = 0; seed < 20; ++seed) {
        auto path = testutil::decode_block_path(serialize_random_walk(cyclic, seed), sizes);
        if (path.empty() || path.front() != entry_block(cyclic)) {
            detail = "random walk does not start at the entry block";
            return false;
        }
        std::set<size_t> visited;
        for (size_t i = 0; i < path.size(); ++i) {
            if (visited.count(path[i])) {
                detail = "random walk revisited a block";
                return false;
            }
            visited.insert(path[i]);
            if (i + 1 < path.size() && !edge_set.count({path[i], path[i + 1]})) {
                detail = "random walk used a nonexistent edge";
                return false;
            }
        }
    }

    // Longest walk equals the best enumerated path on acyclic fixtures.
    struct Fixture {
        std::vector<size_t> sizes;
        std::vector<std::pair<size_t, size_t>> edges;
    };
    std::vector<Fixture> fixtures = {
        {{1, 2, 3, 1}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}},
        {{2, 1, 1, 4, 1, 3}, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {4, 5}}},
        {{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
         {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 6}, {5, 7}, {6, 8},
          {7, 8}, {8, 9}, {9, 10}, {9, 11}}},
        {{3, 1, 5, 2}, {{0, 1}, {1, 2}, {1, 3}}},
    };
    for (const auto& fx : fixtures) {
        Function f = testutil::make_cfg_function(fx.sizes, fx.edges);
        std::vector<std::vector<size_t>> adj(fx.sizes.size());
        for (auto [from, to] : fx.edges) adj[from].push_back(to);
        std::vector<std::vector<size_t>> all_paths;
        std::vector<size_t> scratch;
        enumerate_paths(entry_block(f), adj, scratch, all_paths);
        size_t best = 0;
        for (const auto& p : all_paths) {
            size_t total = 0;
            for (size_t b : p) total += fx.sizes[b];
            best = std::max(best, total);
        }
        auto longest = serialize_longest_walk(f);
        if (longest.size() != best) {
            detail = "longest walk found " + std::to_string(longest.size()) +
                     " instructions, enumeration says " + std::to_string(best);
            return false;
        }
        for (uint64_t seed = 0; seed < 30; ++seed) {
            if (serialize_random_walk(f, seed).size() > longest.size()) {
                detail = "a random walk beat the longest walk";
                return false;
            }
        }
    }
    detail = "linear = address order; 20 walks valid; longest matches enumeration on " +
             std::to_string(fixtures.size()) + " acyclic fixtures (<= 12 blocks)";
    return true;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    std::vector<Criterion> criteria = {
        {1, "gradient-check", check_gradients},
        {2, "mask-law", check_mask_law},
        {3, "causality", check_causality},
        {4, "sfp-exactness", check_sfp_exactness},
        {5, "pair-enumeration", check_pair_grid},
        {6, "tokenizer-fixtures", check_tokenizer_fixtures},
        {7, "normalizer-rules", check_normalizer},
        {8, "search-oracle", check_search_oracle},
        {9, "overfit-smoke", check_overfit},
        {10, "determinism", check_determinism},
        {11, "serialization-properties", check_serialization},
    };

    int failures = 0;
    for (auto& criterion : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %2d %-26s %s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
