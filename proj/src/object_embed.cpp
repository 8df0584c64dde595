#include "revolt/object_embed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revolt {

ObjectEmbedderParams ObjectEmbedderParams::init(int k, uint64_t seed) {
    ObjectEmbedderParams p;
    Rng rng(Rng::mix(seed, 0x4f626a57ULL));
    // near-identity start: keeps node embeddings anchored to their input
    // features, which the nearest-centroid readout depends on
    for (int i = 0; i < k; ++i) {
        Matrix m = Matrix::random(kEmbedDim, kEmbedDim, 0.05, rng);
        for (int d = 0; d < kEmbedDim; ++d) m.at(d, d) += 1.0;
        p.weights.push_back(m);
    }
    return p;
}

namespace {

struct AggregateTrace {
    // layers[k][v]: embedding after depth k (layers[0] = input features)
    std::vector<std::vector<Vec>> layers;
    // means[k][v]: the aggregated mean fed into W^{k+1}
    std::vector<std::vector<Vec>> means;
};

void aggregate_forward(const ObjectGraph& graph, const ObjectEmbedderParams& params,
                       AggregateTrace& trace) {
    int n = graph.node_count();
    trace.layers.assign(1, graph.features);
    trace.means.clear();
    for (int k = 0; k < params.depth(); ++k) {
        const auto& prev = trace.layers.back();
        std::vector<Vec> mean_layer(n), next(n);
        for (int v = 0; v < n; ++v) {
            Vec m = prev[v];
            for (const auto& [u, w] : graph.neighbors[v])
                for (int d = 0; d < kEmbedDim; ++d) m[d] += w * prev[u][d];
            double inv = 1.0 / double(1 + graph.neighbors[v].size());
            for (double& x : m) x *= inv;
            Vec s = matvec(params.weights[k], m);
            Vec h(kEmbedDim);
            for (int d = 0; d < kEmbedDim; ++d) h[d] = sigmoid(s[d]);
            mean_layer[v] = std::move(m);
            next[v] = std::move(h);
        }
        trace.means.push_back(std::move(mean_layer));
        trace.layers.push_back(std::move(next));
    }
}

std::vector<int> negative_pool(const ObjectGraph& graph, int anchor) {
    int n = graph.node_count();
    std::vector<uint8_t> excluded(n, 0);
    excluded[anchor] = 1;
    for (const auto& [u, w] : graph.neighbors[anchor]) excluded[u] = 1;
    std::vector<int> pool;
    for (int i = 0; i < n; ++i)
        if (!excluded[i]) pool.push_back(i);
    if (pool.empty()) // fully connected around anchor: fall back to all others
        for (int i = 0; i < n; ++i)
            if (i != anchor) pool.push_back(i);
    return pool;
}

} // namespace

std::vector<Vec> aggregate(const ObjectGraph& graph, const ObjectEmbedderParams& params) {
    AggregateTrace trace;
    aggregate_forward(graph, params, trace);
    return trace.layers.back();
}

std::vector<Vec> node_embeddings(const ObjectGraph& graph, const ObjectEmbedderParams& params) {
    std::vector<Vec> z = aggregate(graph, params);
    for (auto& v : z)
        for (double& x : v) x -= 0.5;
    return z;
}

double loss_unsup(const std::vector<Vec>& embeddings, const ObjectGraph& graph, int q,
                  uint64_t neg_seed) {
    if (q < 1) throw std::invalid_argument("loss_unsup: Q must be >= 1");
    double loss = 0.0;
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        const Vec& zu = embeddings[edge.u];
        loss += -log_sigmoid(edge.weight * dot(zu, embeddings[edge.v]));
        auto pool = negative_pool(graph, edge.u);
        Rng rng(Rng::mix(neg_seed, e));
        for (int s = 0; s < q; ++s) {
            int n = pool[rng.uniform_int(int(pool.size()))];
            loss += -log_sigmoid(-dot(zu, embeddings[n]));
        }
    }
    return loss;
}

CategoryEmbeddingTable pool_by_category(const std::vector<Vec>& embeddings,
                                        const std::vector<int>& categories, int num_categories) {
    CategoryEmbeddingTable table;
    table.vectors.assign(num_categories, Vec(kEmbedDim, 0.0));
    table.present.assign(num_categories, 0);
    std::vector<int> count(num_categories, 0);
    for (size_t i = 0; i < embeddings.size(); ++i) {
        int c = categories[i];
        count[c]++;
        for (int d = 0; d < kEmbedDim; ++d) table.vectors[c][d] += embeddings[i][d];
    }
    for (int c = 0; c < num_categories; ++c)
        if (count[c] > 0) {
            table.present[c] = 1;
            for (double& x : table.vectors[c]) x /= double(count[c]);
        }
    return table;
}

double object_loss_and_grad(const ObjectGraph& graph, const ObjectEmbedderParams& params, int q,
                            uint64_t neg_seed, std::vector<Matrix>* grads) {
    int n = graph.node_count();
    int num_cats = 0;
    for (int c : graph.category) num_cats = std::max(num_cats, c + 1);

    AggregateTrace trace;
    aggregate_forward(graph, params, trace);

    // category pooling of the centered final layer; the loss reads every
    // node through its category's pooled vector
    std::vector<Vec> centered(n);
    for (int v = 0; v < n; ++v) {
        centered[v] = trace.layers.back()[v];
        for (double& x : centered[v]) x -= 0.5;
    }
    CategoryEmbeddingTable pooled = pool_by_category(centered, graph.category, num_cats);
    std::vector<int> cat_count(num_cats, 0);
    for (int c : graph.category) cat_count[c]++;

    auto zc = [&](int v) -> const Vec& { return pooled.vectors[graph.category[v]]; };

    double loss = 0.0;
    std::vector<Vec> dz_cat(num_cats, Vec(kEmbedDim, 0.0));
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        const Vec& zu = zc(edge.u);
        const Vec& zv = zc(edge.v);
        double s = dot(zu, zv);
        loss += -log_sigmoid(edge.weight * s);
        // d/ds of -log sig(w s) = -w sig(-w s)
        double coef = -edge.weight * sigmoid(-edge.weight * s);
        for (int d = 0; d < kEmbedDim; ++d) {
            dz_cat[graph.category[edge.u]][d] += coef * zv[d];
            dz_cat[graph.category[edge.v]][d] += coef * zu[d];
        }
        auto pool = negative_pool(graph, edge.u);
        Rng rng(Rng::mix(neg_seed, e));
        for (int smp = 0; smp < q; ++smp) {
            int neg = pool[rng.uniform_int(int(pool.size()))];
            const Vec& zn = zc(neg);
            double sn = dot(zu, zn);
            loss += -log_sigmoid(-sn);
            double cn = sigmoid(sn); // d/dsn of -log sig(-sn)
            for (int d = 0; d < kEmbedDim; ++d) {
                dz_cat[graph.category[edge.u]][d] += cn * zn[d];
                dz_cat[graph.category[neg]][d] += cn * zu[d];
            }
        }
    }
    if (!grads) return loss;

    // pooled mean -> per-node gradient (centering shift is gradient-neutral)
    std::vector<Vec> dh(n, Vec(kEmbedDim, 0.0));
    for (int v = 0; v < n; ++v) {
        int c = graph.category[v];
        for (int d = 0; d < kEmbedDim; ++d) dh[v][d] = dz_cat[c][d] / double(cat_count[c]);
    }

    grads->assign(params.depth(), Matrix(kEmbedDim, kEmbedDim));
    for (int k = params.depth() - 1; k >= 0; --k) {
        const auto& h_out = trace.layers[k + 1];
        const auto& h_in = trace.layers[k];
        std::vector<Vec> dh_in(n, Vec(kEmbedDim, 0.0));
        Matrix& gw = (*grads)[k];
        for (int v = 0; v < n; ++v) {
            Vec ds(kEmbedDim);
            for (int d = 0; d < kEmbedDim; ++d)
                ds[d] = dh[v][d] * h_out[v][d] * (1.0 - h_out[v][d]);
            const Vec& m = trace.means[k][v];
            for (int r = 0; r < kEmbedDim; ++r)
                for (int c = 0; c < kEmbedDim; ++c) gw.at(r, c) += ds[r] * m[c];
            Vec dm = matvec_t(params.weights[k], ds);
            double inv = 1.0 / double(1 + graph.neighbors[v].size());
            for (int d = 0; d < kEmbedDim; ++d) dh_in[v][d] += inv * dm[d];
            for (const auto& [u, w] : graph.neighbors[v])
                for (int d = 0; d < kEmbedDim; ++d) dh_in[u][d] += inv * w * dm[d];
        }
        dh = std::move(dh_in);
        (void)h_in;
    }
    return loss;
}

ObjectTrainResult train_object_embedder(const std::vector<HouseSpec>& train_houses,
                                        const std::vector<HouseSpec>& test_houses,
                                        const ObjectTrainConfig& config) {
    if (train_houses.empty()) throw std::invalid_argument("train_object_embedder: empty split");
    int num_cats = 0;
    std::vector<ObjectGraph> graphs;
    graphs.reserve(train_houses.size());
    for (const auto& h : train_houses) {
        graphs.push_back(extract_object_graph(h, config.feature_seed));
        for (int c : graphs.back().category) num_cats = std::max(num_cats, c + 1);
    }

    ObjectTrainResult out;
    out.params = ObjectEmbedderParams::init(config.depth, config.seed);
    SgdState sgd(config.learning_rate, config.seed);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double total = 0.0;
        for (size_t g = 0; g < graphs.size(); ++g) {
            std::vector<Matrix> grads;
            uint64_t neg_seed = Rng::mix(config.seed, uint64_t(epoch) * 1000003ULL + g);
            double loss =
                object_loss_and_grad(graphs[g], out.params, config.negatives, neg_seed, &grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_object_embedder: diverged (non-finite loss)");
            std::vector<Matrix*> ps, gs;
            for (int k = 0; k < out.params.depth(); ++k) {
                ps.push_back(&out.params.weights[k]);
                gs.push_back(&grads[k]);
            }
            sgd_step(ps, gs, sgd);
            total += loss / std::max<size_t>(1, graphs[g].edges.size());
        }
        out.loss_history.push_back(total / double(graphs.size()));
    }

    // persisted table: mean embedding per category over the train split; an
    // untrained run reports the pooled raw features instead
    std::vector<Vec> all_emb;
    std::vector<int> all_cat;
    for (const auto& g : graphs) {
        std::vector<Vec> z =
            config.epochs == 0 ? g.features : node_embeddings(g, out.params);
        all_emb.insert(all_emb.end(), z.begin(), z.end());
        all_cat.insert(all_cat.end(), g.category.begin(), g.category.end());
    }
    out.table = pool_by_category(all_emb, all_cat, num_cats);

    // held-out proxy accuracy: nearest centroid over test-house instances
    long correct = 0, total_nodes = 0;
    for (const auto& h : test_houses) {
        ObjectGraph g = extract_object_graph(h, config.feature_seed);
        std::vector<Vec> z = config.epochs == 0 ? g.features : node_embeddings(g, out.params);
        for (int v = 0; v < g.node_count(); ++v) {
            int best = -1;
            double best_d = 1e300;
            for (int c = 0; c < out.table.category_count(); ++c) {
                if (!out.table.present[c]) continue;
                double d2 = 0.0;
                for (int k = 0; k < kEmbedDim; ++k) {
                    double diff = z[v][k] - out.table.vectors[c][k];
                    d2 += diff * diff;
                }
                if (d2 < best_d) {
                    best_d = d2;
                    best = c;
                }
            }
            total_nodes++;
            if (best == g.category[v]) correct++;
        }
    }
    out.holdout_accuracy = total_nodes == 0 ? 0.0 : double(correct) / double(total_nodes);
    return out;
}

} // namespace revolt
