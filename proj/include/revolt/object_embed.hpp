#pragma once

#include <vector>

#include "revolt/graphs.hpp"
#include "revolt/numeric.hpp"

namespace revolt {

// Edge-weighted mean-aggregator weights, one matrix per search depth.
struct ObjectEmbedderParams {
    std::vector<Matrix> weights; // K matrices, kEmbedDim x kEmbedDim

    int depth() const { return int(weights.size()); }
    static ObjectEmbedderParams init(int k, uint64_t seed);
};

struct CategoryEmbeddingTable {
    std::vector<Vec> vectors;     // per category id
    std::vector<uint8_t> present; // category seen in training data

    int category_count() const { return int(vectors.size()); }
    const Vec& of(int category) const { return vectors[category]; }
};

// One sigmoid(W^k . mean({h_v} u {w_uv h_u})) sweep per depth; the mean is
// over 1 + |N(v)| vectors, so an isolated node propagates only itself.
std::vector<Vec> aggregate(const ObjectGraph& graph, const ObjectEmbedderParams& params);

// Final node embeddings used everywhere downstream: aggregate() shifted by
// -0.5 per component. The shift makes dot products sign-indefinite, which
// the membership and bias scores need; sigmoid outputs alone cannot produce
// a similarity below sigma(0).
std::vector<Vec> node_embeddings(const ObjectGraph& graph, const ObjectEmbedderParams& params);

// Negative-sampling edge loss. For every edge (u, v, w): -log sig(w z_u.z_v)
// plus Q terms -log sig(-z_u.z_n) with n drawn uniformly from u's
// non-neighbors (all other nodes when u neighbors everything). Negative
// pairs carry weight 1 since no edge weight exists for them.
double loss_unsup(const std::vector<Vec>& embeddings, const ObjectGraph& graph, int q,
                  uint64_t neg_seed);

// Arithmetic mean of the given embeddings per category.
CategoryEmbeddingTable pool_by_category(const std::vector<Vec>& embeddings,
                                        const std::vector<int>& categories, int num_categories);

// Loss of the full pipeline (aggregate -> center -> pool -> loss_unsup) and,
// when grads is non-null, its gradient with respect to the stacked weights.
double object_loss_and_grad(const ObjectGraph& graph, const ObjectEmbedderParams& params, int q,
                            uint64_t neg_seed, std::vector<Matrix>* grads);

struct ObjectTrainConfig {
    int depth = 2;          // K
    int negatives = 5;      // Q
    double learning_rate = 0.05;
    int epochs = 120;
    uint64_t seed = 1;
    uint64_t feature_seed = 99;
};

struct ObjectTrainResult {
    ObjectEmbedderParams params;
    CategoryEmbeddingTable table;
    std::vector<double> loss_history;   // mean loss per epoch
    double holdout_accuracy = 0.0;      // nearest-centroid over held-out instances
};

ObjectTrainResult train_object_embedder(const std::vector<HouseSpec>& train_houses,
                                        const std::vector<HouseSpec>& test_houses,
                                        const ObjectTrainConfig& config);

} // namespace revolt
