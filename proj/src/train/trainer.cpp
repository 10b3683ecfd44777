#include "train/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "common/errors.hpp"
#include "common/io.hpp"
#include "model/checkpoint.hpp"
#include "train/losses.hpp"

namespace uniasm {

void TrainConfig::validate() const {
    if (!task_alg && !task_sfp && !task_mlm) {
        throw ValidationError("at least one training task must be enabled");
    }
    if (task_sfp && (batch < 2 || batch % 2 != 0)) {
        throw ValidationError("SFP requires an even batch size of at least 2");
    }
    if (batch < 1) throw ValidationError("batch size must be >= 1");
    if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
    if (task_mlm && !(mlm_rate > 0.0 && mlm_rate < 1.0)) {
        throw ValidationError("mlm mask rate must lie in (0, 1)");
    }
    if (max_steps < 1) throw ValidationError("max steps must be >= 1");
}

StepMetrics train_step(const std::vector<const PackedSequence*>& batch,
                       Parameters<float>& params, AdamState<float>& opt, const TrainConfig& config,
                       uint64_t mlm_seed) {
    Parameters<float> grads = zeros_like(params);

    StepMetrics metrics;
    if (config.task_alg || config.task_sfp) {
        BatchLosses joint =
            joint_loss<float>(batch, params, config.task_alg, config.task_sfp, &grads);
        metrics.loss_alg = joint.alg;
        metrics.loss_sfp = joint.sfp;
    }
    if (config.task_mlm) {
        MlmResult mlm = mlm_loss<float>(batch, params, config.mlm_rate, mlm_seed, &grads);
        metrics.loss_mlm = mlm.loss;
    }
    metrics.loss_total = metrics.loss_alg + metrics.loss_sfp + metrics.loss_mlm;

    if (!std::isfinite(metrics.loss_total)) {
        std::ostringstream dump;
        dump << "non-finite loss at step " << opt.step + 1 << "; batch ids:";
        for (const PackedSequence* seq : batch) {
            dump << " [";
            for (size_t i = 0; i < seq->ids.size(); ++i) {
                if (i) dump << ",";
                dump << seq->ids[i];
            }
            dump << "]";
        }
        throw RuntimeFault(dump.str());
    }

    metrics.lr = adam_step(params, grads, opt, config.lr, config.warmup);
    metrics.step = opt.step;
    return metrics;
}

TrainOutcome train_loop(const std::vector<DatasetRecord>& records, Parameters<float>& params,
                        const TrainConfig& config, const std::string& run_dir) {
    config.validate();
    if (records.empty()) throw ValidationError("training dataset is empty");
    if (records.size() % 2 != 0) {
        throw ValidationError("training dataset must hold swap duos (even record count)");
    }
    for (const auto& r : records) {
        if (r.packed.ids.size() > params.config.max_sl) {
            throw ValidationError("dataset record longer than the model MaxSL");
        }
        for (int32_t id : r.packed.ids) {
            if (id < 0 || static_cast<uint32_t>(id) >= params.config.vocab) {
                throw ValidationError("dataset token id exceeds the model vocabulary");
            }
        }
    }

    std::filesystem::create_directories(run_dir);
    {
        nlohmann::json snapshot;
        snapshot["model"] = {{"layers", params.config.layers},
                             {"heads", params.config.heads},
                             {"hidden", params.config.hidden},
                             {"intermediate", params.config.intermediate},
                             {"max_sl", params.config.max_sl},
                             {"vocab", params.config.vocab}};
        snapshot["train"] = {{"batch", config.batch},
                             {"lr", config.lr},
                             {"warmup", config.warmup},
                             {"max_steps", config.max_steps},
                             {"checkpoint_every", config.checkpoint_every},
                             {"seed", config.seed},
                             {"tasks",
                              {{"alg", config.task_alg},
                               {"sfp", config.task_sfp},
                               {"mlm", config.task_mlm}}},
                             {"mlm_rate", config.mlm_rate}};
        snapshot["dataset"] = {{"records", records.size()}};
        write_file_atomic(run_dir + "/config.json", snapshot.dump(2) + "\n");
    }

    std::ofstream metrics_out(run_dir + "/metrics.jsonl", std::ios::trunc);
    if (!metrics_out) throw RuntimeFault("cannot open metrics log in " + run_dir);

    size_t duos = records.size() / 2;
    size_t duos_per_batch = config.batch / 2;
    if (duos_per_batch == 0) duos_per_batch = 1;

    std::vector<size_t> order(duos);
    for (size_t i = 0; i < duos; ++i) order[i] = i;

    AdamState<float> opt = AdamState<float>::init(params);
    std::mt19937_64 shuffle_rng(config.seed);
    TrainOutcome outcome;

    bool done = false;
    while (!done) {
        for (size_t i = duos; i > 1; --i) {
            size_t j = static_cast<size_t>(shuffle_rng() % i);
            std::swap(order[i - 1], order[j]);
        }
        for (size_t at = 0; at < duos && !done; at += duos_per_batch) {
            size_t take = std::min(duos_per_batch, duos - at);
            std::vector<const PackedSequence*> batch;
            batch.reserve(take * 2);
            for (size_t u = 0; u < take; ++u) {
                batch.push_back(&records[order[at + u] * 2].packed);
                batch.push_back(&records[order[at + u] * 2 + 1].packed);
            }

            uint64_t mlm_seed = config.seed * 1000003ull + opt.step + 1;
            StepMetrics metrics = train_step(batch, params, opt, config, mlm_seed);

            nlohmann::json line = {{"step", metrics.step},
                                   {"lr", metrics.lr},
                                   {"loss_alg", metrics.loss_alg},
                                   {"loss_sfp", metrics.loss_sfp},
                                   {"loss_mlm", metrics.loss_mlm},
                                   {"loss_total", metrics.loss_total}};
            metrics_out << line.dump() << "\n";
            metrics_out.flush();

            outcome.steps = metrics.step;
            outcome.final_loss = metrics.loss_total;

            if (config.checkpoint_every > 0 && metrics.step % config.checkpoint_every == 0) {
                save_checkpoint(run_dir + "/checkpoint-" + std::to_string(metrics.step) + ".uasm",
                                params);
            }
            if (metrics.step >= config.max_steps) done = true;
        }
    }

    outcome.final_checkpoint = run_dir + "/checkpoint-final.uasm";
    save_checkpoint(outcome.final_checkpoint, params);
    return outcome;
}

} // namespace uniasm
