#include "revolt/region_embed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revolt {

RegionEmbedderParams RegionEmbedderParams::init(int num_labels, int hidden, uint64_t seed) {
    Rng rng(Rng::mix(seed, 0x5267696fULL));
    RegionEmbedderParams p;
    p.gcn = Matrix::random(kEmbedDim, kEmbedDim, 0.4, rng);
    p.mlp_w1 = Matrix::random(hidden, kEmbedDim, 0.4, rng);
    p.mlp_b1 = Matrix(1, hidden);
    p.mlp_w2 = Matrix::random(num_labels, hidden, 0.4, rng);
    p.mlp_b2 = Matrix(1, num_labels);
    return p;
}

std::vector<Matrix*> RegionEmbedderParams::matrices() {
    return {&gcn, &mlp_w1, &mlp_b1, &mlp_w2, &mlp_b2};
}

namespace {

struct RegionTrace {
    std::vector<Vec> propagated; // A_hat Z rows, per member
    std::vector<Vec> activated;  // sigmoid(W . propagated), per member
    Vec pooled;                  // mean of activated
};

// weighted adjacency + self-loops, symmetric-normalized propagation
void region_forward(const RegionSubgraph& sub, const CategoryEmbeddingTable& table,
                    const RegionEmbedderParams& params, RegionTrace& trace) {
    int m = int(sub.categories.size());
    if (m == 0) throw std::invalid_argument("embed_region: empty region");

    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) a[i][i] = 1.0;
    for (const auto& e : sub.edges) {
        a[e.u][e.v] += e.weight;
        a[e.v][e.u] += e.weight;
    }
    std::vector<double> dinv(m);
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int j = 0; j < m; ++j) row += a[i][j];
        dinv[i] = 1.0 / std::sqrt(row);
    }

    trace.propagated.assign(m, Vec(kEmbedDim, 0.0));
    trace.activated.assign(m, Vec(kEmbedDim, 0.0));
    trace.pooled.assign(kEmbedDim, 0.0);
    for (int i = 0; i < m; ++i) {
        Vec& prop = trace.propagated[i];
        for (int j = 0; j < m; ++j) {
            double w = a[i][j] * dinv[i] * dinv[j];
            if (w == 0.0) continue;
            const Vec& z = table.of(sub.categories[j]);
            for (int d = 0; d < kEmbedDim; ++d) prop[d] += w * z[d];
        }
        Vec s = matvec(params.gcn, prop);
        for (int d = 0; d < kEmbedDim; ++d) {
            trace.activated[i][d] = sigmoid(s[d]);
            trace.pooled[d] += trace.activated[i][d] / double(m);
        }
    }
}

} // namespace

Vec embed_region(const RegionSubgraph& sub, const CategoryEmbeddingTable& table,
                 const RegionEmbedderParams& params) {
    RegionTrace trace;
    region_forward(sub, table, params, trace);
    return trace.pooled;
}

Vec label_logits(const Vec& r, const RegionEmbedderParams& params) {
    Vec pre = matvec(params.mlp_w1, r);
    for (int i = 0; i < params.mlp_w1.rows; ++i) pre[i] = sigmoid(pre[i] + params.mlp_b1.at(0, i));
    Vec logits = matvec(params.mlp_w2, pre);
    for (int i = 0; i < params.mlp_w2.rows; ++i) logits[i] += params.mlp_b2.at(0, i);
    return logits;
}

double loss_region(const Vec& r, const std::vector<Vec>& member_z,
                   const std::vector<Vec>& non_member_pool, int label,
                   const RegionEmbedderParams& params, int q, uint64_t seed, int batch_n) {
    if (q < 1) throw std::invalid_argument("loss_region: Q must be >= 1");
    double loss = 0.0;
    for (const Vec& z : member_z) loss += -log_sigmoid(dot(r, z));
    if (!non_member_pool.empty()) {
        Rng rng(Rng::mix(seed, 0x4e656753ULL));
        for (int s = 0; s < q; ++s) {
            const Vec& z = non_member_pool[rng.uniform_int(int(non_member_pool.size()))];
            loss += -log_sigmoid(-dot(r, z));
        }
    }
    Vec ls = log_softmax(label_logits(r, params));
    loss += -ls[label] / double(batch_n);
    return loss;
}

double region_loss_and_grad(const RegionSubgraph& sub, const CategoryEmbeddingTable& table,
                            const RegionEmbedderParams& params, int q, uint64_t seed,
                            int batch_n, std::vector<Matrix>* grads) {
    RegionTrace trace;
    region_forward(sub, table, params, trace);
    const Vec& r = trace.pooled;

    // assemble member embeddings and the non-member category pool
    std::vector<Vec> member_z;
    for (int c : sub.categories) member_z.push_back(table.of(c));
    std::vector<uint8_t> in_region(table.category_count(), 0);
    for (int c : sub.categories) in_region[c] = 1;
    std::vector<Vec> pool;
    std::vector<int> pool_cat;
    for (int c = 0; c < table.category_count(); ++c)
        if (table.present[c] && !in_region[c]) {
            pool.push_back(table.of(c));
            pool_cat.push_back(c);
        }

    double loss = 0.0;
    Vec dr(kEmbedDim, 0.0);
    for (const Vec& z : member_z) {
        double s = dot(r, z);
        loss += -log_sigmoid(s);
        double coef = -sigmoid(-s);
        for (int d = 0; d < kEmbedDim; ++d) dr[d] += coef * z[d];
    }
    if (!pool.empty()) {
        Rng rng(Rng::mix(seed, 0x4e656753ULL));
        for (int s = 0; s < q; ++s) {
            const Vec& z = pool[rng.uniform_int(int(pool.size()))];
            double sn = dot(r, z);
            loss += -log_sigmoid(-sn);
            double coef = sigmoid(sn);
            for (int d = 0; d < kEmbedDim; ++d) dr[d] += coef * z[d];
        }
    }

    // classification head
    Vec pre = matvec(params.mlp_w1, r);
    Vec hidden(params.mlp_w1.rows);
    for (int i = 0; i < params.mlp_w1.rows; ++i)
        hidden[i] = sigmoid(pre[i] + params.mlp_b1.at(0, i));
    Vec logits = matvec(params.mlp_w2, hidden);
    for (int i = 0; i < params.mlp_w2.rows; ++i) logits[i] += params.mlp_b2.at(0, i);
    Vec ls = log_softmax(logits);
    double inv_n = 1.0 / double(batch_n);
    loss += -ls[sub.label] * inv_n;

    if (!grads) return loss;
    grads->clear();
    grads->emplace_back(kEmbedDim, kEmbedDim);                      // gcn
    grads->emplace_back(params.mlp_w1.rows, params.mlp_w1.cols);    // w1
    grads->emplace_back(1, params.mlp_b1.cols);                     // b1
    grads->emplace_back(params.mlp_w2.rows, params.mlp_w2.cols);    // w2
    grads->emplace_back(1, params.mlp_b2.cols);                     // b2
    Matrix& g_gcn = (*grads)[0];
    Matrix& g_w1 = (*grads)[1];
    Matrix& g_b1 = (*grads)[2];
    Matrix& g_w2 = (*grads)[3];
    Matrix& g_b2 = (*grads)[4];

    Vec dlogits = softmax(logits);
    dlogits[sub.label] -= 1.0;
    for (double& v : dlogits) v *= inv_n;
    for (int i = 0; i < params.mlp_w2.rows; ++i) {
        g_b2.at(0, i) += dlogits[i];
        for (int j = 0; j < params.mlp_w2.cols; ++j)
            g_w2.at(i, j) += dlogits[i] * hidden[j];
    }
    Vec dhidden = matvec_t(params.mlp_w2, dlogits);
    for (int i = 0; i < params.mlp_w1.rows; ++i) {
        double dpre = dhidden[i] * hidden[i] * (1.0 - hidden[i]);
        g_b1.at(0, i) += dpre;
        for (int j = 0; j < params.mlp_w1.cols; ++j) g_w1.at(i, j) += dpre * r[j];
        for (int j = 0; j < kEmbedDim; ++j) dr[j] += dpre * params.mlp_w1.at(i, j);
    }

    // pooled mean -> per-member activations -> gcn weight
    int m = int(sub.categories.size());
    for (int i = 0; i < m; ++i) {
        Vec ds(kEmbedDim);
        for (int d = 0; d < kEmbedDim; ++d) {
            double h = trace.activated[i][d];
            ds[d] = (dr[d] / double(m)) * h * (1.0 - h);
        }
        for (int rr = 0; rr < kEmbedDim; ++rr)
            for (int cc = 0; cc < kEmbedDim; ++cc)
                g_gcn.at(rr, cc) += ds[rr] * trace.propagated[i][cc];
    }
    return loss;
}

LabelEmbeddingTable pool_by_label(const std::vector<Vec>& region_embeddings,
                                  const std::vector<int>& labels, int num_labels) {
    LabelEmbeddingTable table;
    table.vectors.assign(num_labels, Vec(kEmbedDim, 0.0));
    table.present.assign(num_labels, 0);
    std::vector<int> count(num_labels, 0);
    for (size_t i = 0; i < region_embeddings.size(); ++i) {
        int l = labels[i];
        count[l]++;
        for (int d = 0; d < kEmbedDim; ++d) table.vectors[l][d] += region_embeddings[i][d];
    }
    for (int l = 0; l < num_labels; ++l)
        if (count[l] > 0) {
            table.present[l] = 1;
            for (double& x : table.vectors[l]) x /= double(count[l]);
        }
    return table;
}

RegionTrainResult train_region_embedder(const std::vector<HouseSpec>& train_houses,
                                        const std::vector<HouseSpec>& test_houses,
                                        const CategoryEmbeddingTable& table,
                                        const RegionTrainConfig& config) {
    if (train_houses.empty()) throw std::invalid_argument("train_region_embedder: empty split");

    std::vector<std::vector<RegionSubgraph>> house_subs;
    for (const auto& h : train_houses) {
        std::vector<RegionSubgraph> subs = extract_region_subgraphs(h);
        std::erase_if(subs, [](const RegionSubgraph& s) { return s.empty(); });
        house_subs.push_back(std::move(subs));
    }

    RegionTrainResult out;
    out.params = RegionEmbedderParams::init(config.num_labels, config.hidden, config.seed);
    SgdState sgd(config.learning_rate, config.seed);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double total = 0.0;
        long rooms = 0;
        for (size_t hi = 0; hi < house_subs.size(); ++hi) {
            const auto& subs = house_subs[hi];
            if (subs.empty()) continue;
            std::vector<Matrix> acc;
            double house_loss = 0.0;
            for (size_t si = 0; si < subs.size(); ++si) {
                std::vector<Matrix> g;
                uint64_t seed =
                    Rng::mix(config.seed, (uint64_t(epoch) * 7919ULL + hi) * 131ULL + si);
                house_loss += region_loss_and_grad(subs[si], table, out.params, config.negatives,
                                                   seed, int(subs.size()), &g);
                if (acc.empty())
                    acc = std::move(g);
                else
                    for (size_t k = 0; k < acc.size(); ++k)
                        for (size_t x = 0; x < acc[k].data.size(); ++x)
                            acc[k].data[x] += g[k].data[x];
            }
            if (!std::isfinite(house_loss))
                throw std::runtime_error("train_region_embedder: diverged (non-finite loss)");
            std::vector<Matrix*> ps = out.params.matrices(), gs;
            for (auto& m : acc) gs.push_back(&m);
            sgd_step(ps, gs, sgd);
            total += house_loss;
            rooms += long(subs.size());
        }
        out.loss_history.push_back(total / double(std::max(1L, rooms)));
    }

    // label table from train-split region embeddings
    std::vector<Vec> embs;
    std::vector<int> labels;
    for (const auto& subs : house_subs)
        for (const auto& s : subs) {
            embs.push_back(embed_region(s, table, out.params));
            labels.push_back(s.label);
        }
    out.label_table = pool_by_label(embs, labels, config.num_labels);

    // held-out metrics
    long mem_correct = 0, mem_total = 0, cls_correct = 0, cls_total = 0;
    Rng eval_rng(Rng::mix(config.seed, 0x4576616cULL));
    for (const auto& h : test_houses) {
        for (const auto& sub : extract_region_subgraphs(h)) {
            if (sub.empty()) continue;
            Vec r = embed_region(sub, table, out.params);
            std::vector<uint8_t> in_region(table.category_count(), 0);
            for (int c : sub.categories) in_region[c] = 1;
            std::vector<int> pool;
            for (int c = 0; c < table.category_count(); ++c)
                if (table.present[c] && !in_region[c]) pool.push_back(c);
            for (int c : sub.categories) {
                mem_total++;
                if (sigmoid(dot(r, table.of(c))) > 0.5) mem_correct++;
            }
            for (size_t i = 0; i < sub.categories.size() && !pool.empty(); ++i) {
                int c = pool[eval_rng.uniform_int(int(pool.size()))];
                mem_total++;
                if (sigmoid(dot(r, table.of(c))) <= 0.5) mem_correct++;
            }
            Vec logits = label_logits(r, out.params);
            int arg = int(std::max_element(logits.begin(), logits.end()) - logits.begin());
            cls_total++;
            if (arg == sub.label) cls_correct++;
        }
    }
    out.membership_accuracy = mem_total == 0 ? 0.0 : double(mem_correct) / double(mem_total);
    out.classification_accuracy = cls_total == 0 ? 0.0 : double(cls_correct) / double(cls_total);
    return out;
}

} // namespace revolt
