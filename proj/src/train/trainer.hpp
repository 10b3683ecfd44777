#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "model/params.hpp"
#include "train/optimizer.hpp"

namespace uniasm {

struct TrainConfig {
    size_t batch = 8;
    double lr = 5e-5;
    uint64_t warmup = 4;
    uint64_t max_steps = 1000;
    uint64_t checkpoint_every = 0; // 0: only the final checkpoint
    uint64_t seed = 1;
    bool task_alg = true;
    bool task_sfp = true;
    bool task_mlm = false;
    double mlm_rate = 0.15;

    void validate() const;
};

struct StepMetrics {
    uint64_t step = 0;
    double lr = 0.0;
    double loss_alg = 0.0;
    double loss_sfp = 0.0;
    double loss_mlm = 0.0;
    double loss_total = 0.0;
};

// One optimizer update on one batch. The batch holds swap duos back to back
// (samples 2k and 2k+1 are a pair and its swap) as the contrastive loss
// expects. `mlm_seed` fixes the mask draw for the ablation task.
StepMetrics train_step(const std::vector<const PackedSequence*>& batch,
                       Parameters<float>& params, AdamState<float>& opt, const TrainConfig& config,
                       uint64_t mlm_seed);

struct TrainOutcome {
    uint64_t steps = 0;
    double final_loss = 0.0;
    std::string final_checkpoint;
};

// Runs the loop over swap-duo batches, writing into run_dir: config.json (the
// snapshot), metrics.jsonl (one line per step), periodic checkpoints, and
// checkpoint-final.uasm.
TrainOutcome train_loop(const std::vector<DatasetRecord>& records, Parameters<float>& params,
                        const TrainConfig& config, const std::string& run_dir);

} // namespace uniasm
