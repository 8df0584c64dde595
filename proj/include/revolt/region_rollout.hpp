#pragma once

#include <vector>

#include "revolt/graphs.hpp"
#include "revolt/numeric.hpp"
#include "revolt/region_embed.hpp"

namespace revolt {

// One step of the masked region-sequence encoding, stored sparsely: only
// the nonzero 16-wide blocks of the n_max x n_max x 16 tensor. Block
// `cell` = j * n_max + k addresses tensor position (j, k).
struct MaskedStep {
    std::vector<std::pair<int, Vec>> blocks;

    bool zero() const { return blocks.empty(); }
};

// Gated recurrent cell over flattened masked step tensors plus a linear
// head that emits a predicted region embedding.
struct RolloutParams {
    int n_max = 12;
    int hidden = 64;
    Matrix wz, wr, wn; // hidden x (n_max^2 * kEmbedDim)
    Matrix uz, ur, un; // hidden x hidden
    Matrix bz, br, bn; // 1 x hidden
    Matrix head_w;     // kEmbedDim x hidden
    Matrix head_b;     // 1 x kEmbedDim

    int input_dim() const { return n_max * n_max * kEmbedDim; }
    static RolloutParams init(int n_max, int hidden, uint64_t seed);
    std::vector<Matrix*> matrices();
    std::vector<const Matrix*> matrices() const;
};

// Step i of the training encoding: for every predecessor j adjacent to
// region i, blocks (j, i) and (i, j) carry the predecessor's label
// embedding. Step 0 is all-zero and doubles as the start token, so the
// encoding never contains the embedding of the region being predicted.
std::vector<MaskedStep> build_masked_sequence(const HouseSequence& seq,
                                              const LabelEmbeddingTable& labels, int n_max);

// Literal mask-times-embedding tensor (row j broadcast across columns),
// densely materialized; an all-ones adjacency reproduces the unmasked
// row-broadcast embedding tensor.
std::vector<double> masked_embedding_tensor(const std::vector<std::vector<uint8_t>>& adjacency,
                                            const std::vector<Vec>& row_embeddings, int n_max);

std::vector<double> step_to_dense(const MaskedStep& step, int n_max);

struct RolloutPrediction {
    Vec embedding;          // x_hat
    Vec label_distribution; // softmax over x_hat . r_l, absent labels at 0
};

// Runs the cell over the prefix and predicts the region whose attachment
// step is the last prefix entry. The prefix must be non-empty; a single
// all-zero step stands for the first region.
RolloutPrediction predict_next(const std::vector<MaskedStep>& prefix, const RolloutParams& params,
                               const LabelEmbeddingTable& labels);

// Mean cross-entropy between predicted embeddings and true labels under
// the label-embedding softmax.
double loss_rollout(const std::vector<Vec>& predicted, const std::vector<int>& true_labels,
                    const LabelEmbeddingTable& labels);

// Teacher-forced sequence loss and full-BPTT gradient for one house.
double rollout_loss_and_grad(const std::vector<MaskedStep>& steps,
                             const std::vector<int>& true_labels, const RolloutParams& params,
                             const LabelEmbeddingTable& labels, std::vector<Matrix>* grads);

// An observed region for simulation: its label and the prefix index it
// attaches to (-1 for the first region).
struct PrefixRegion {
    int label = 0;
    int parent = -1;
};

// Samples `samples` label trajectories of length `depth` that grow from
// prefix region `spawn_index`, realizing each sampled label's embedding,
// scores every visited label by sigma(r_l . z_target) and returns the mean
// of per-trajectory maxima. Deterministic given (prefix, seed).
double rollout_simulate(const std::vector<PrefixRegion>& prefix, int spawn_index, int depth,
                        int samples, const Vec& target_embedding, const RolloutParams& params,
                        const LabelEmbeddingTable& labels, uint64_t seed);

struct RolloutTrainConfig {
    int n_max = 12;
    int hidden = 64;
    double learning_rate = 0.08;
    int epochs = 60;
    uint64_t seed = 3;
};

struct RolloutTrainResult {
    RolloutParams params;
    std::vector<double> loss_history;
    double holdout_top1 = 0.0;
};

RolloutTrainResult train_rollout(const std::vector<HouseSpec>& train_houses,
                                 const std::vector<HouseSpec>& test_houses,
                                 const LabelEmbeddingTable& labels,
                                 const RolloutTrainConfig& config);

} // namespace revolt
