#pragma once

#include <vector>

#include "revolt/graphs.hpp"
#include "revolt/numeric.hpp"
#include "revolt/object_embed.hpp"

namespace revolt {

// One graph-convolution layer plus the label classifier head.
struct RegionEmbedderParams {
    Matrix gcn;     // kEmbedDim x kEmbedDim
    Matrix mlp_w1;  // hidden x kEmbedDim
    Matrix mlp_b1;  // 1 x hidden
    Matrix mlp_w2;  // labels x hidden
    Matrix mlp_b2;  // 1 x labels

    int label_count() const { return mlp_w2.rows; }
    static RegionEmbedderParams init(int num_labels, int hidden, uint64_t seed);

    std::vector<Matrix*> matrices();
};

struct LabelEmbeddingTable {
    std::vector<Vec> vectors;
    std::vector<uint8_t> present;

    int label_count() const { return int(vectors.size()); }
    const Vec& of(int label) const { return vectors[label]; }
};

// Symmetric-normalized propagation with self-loops over the member object
// embeddings, one sigmoid layer, mean-pooled. Rejects empty regions.
Vec embed_region(const RegionSubgraph& sub, const CategoryEmbeddingTable& table,
                 const RegionEmbedderParams& params);

// Classifier logits for a region embedding.
Vec label_logits(const Vec& region_embedding, const RegionEmbedderParams& params);

// Membership + negative-sampling + classification loss for one region.
// batch_n is the 1/n divisor applied to the classification term.
double loss_region(const Vec& region_embedding, const std::vector<Vec>& member_z,
                   const std::vector<Vec>& non_member_pool, int label,
                   const RegionEmbedderParams& params, int q, uint64_t seed, int batch_n);

LabelEmbeddingTable pool_by_label(const std::vector<Vec>& region_embeddings,
                                  const std::vector<int>& labels, int num_labels);

// Loss and gradient of the full pipeline (embed_region -> loss_region) for
// one region; object embeddings stay frozen. Gradient order matches
// params.matrices().
double region_loss_and_grad(const RegionSubgraph& sub, const CategoryEmbeddingTable& table,
                            const RegionEmbedderParams& params, int q, uint64_t seed,
                            int batch_n, std::vector<Matrix>* grads);

struct RegionTrainConfig {
    int hidden = 32;
    int negatives = 5;
    double learning_rate = 0.05;
    int epochs = 150;
    uint64_t seed = 2;
    int num_labels = 10;
};

struct RegionTrainResult {
    RegionEmbedderParams params;
    LabelEmbeddingTable label_table;
    std::vector<double> loss_history;
    double membership_accuracy = 0.0;     // held-out, threshold 0.5
    double classification_accuracy = 0.0; // held-out, argmax
};

RegionTrainResult train_region_embedder(const std::vector<HouseSpec>& train_houses,
                                        const std::vector<HouseSpec>& test_houses,
                                        const CategoryEmbeddingTable& table,
                                        const RegionTrainConfig& config);

} // namespace revolt
