// scratch experiments on object-embedding separability; not shipped
#include <cstdio>
#include <cstring>

#include "revolt/object_embed.hpp"

using namespace revolt;

static double accuracy(const std::vector<HouseSpec>& test, const CategoryEmbeddingTable& table,
                       const ObjectEmbedderParams& params, uint64_t fseed) {
    long correct = 0, total = 0;
    for (const auto& h : test) {
        ObjectGraph g = extract_object_graph(h, fseed);
        auto z = node_embeddings(g, params);
        for (int v = 0; v < g.node_count(); ++v) {
            int best = -1;
            double bd = 1e300;
            for (int c = 0; c < table.category_count(); ++c) {
                if (!table.present[c]) continue;
                double d2 = 0;
                for (int k = 0; k < kEmbedDim; ++k) {
                    double df = z[v][k] - table.vectors[c][k];
                    d2 += df * df;
                }
                if (d2 < bd) {
                    bd = d2;
                    best = c;
                }
            }
            total++;
            if (best == g.category[v]) correct++;
        }
    }
    return double(correct) / double(total);
}

static CategoryEmbeddingTable build_table(const std::vector<HouseSpec>& train,
                                          const ObjectEmbedderParams& params, uint64_t fseed,
                                          int ncat) {
    std::vector<Vec> all;
    std::vector<int> cats;
    for (const auto& h : train) {
        ObjectGraph g = extract_object_graph(h, fseed);
        auto z = node_embeddings(g, params);
        all.insert(all.end(), z.begin(), z.end());
        cats.insert(cats.end(), g.category.begin(), g.category.end());
    }
    return pool_by_category(all, cats, ncat);
}

int main(int argc, char** argv) {
    auto cfg = GeneratorConfig::defaults();
    uint64_t fseed = 99;
    std::vector<HouseSpec> train, test;
    for (uint64_t s = 0; s < 300; ++s)
        (is_test_seed(s) ? test : train).push_back(generate_house(s, cfg));

    for (int k : {1, 2}) {
        // identity-scaled weights
        for (double scale : {1.0, 2.0, 4.0}) {
            ObjectEmbedderParams p;
            for (int i = 0; i < k; ++i) {
                Matrix m(kEmbedDim, kEmbedDim);
                for (int d = 0; d < kEmbedDim; ++d) m.at(d, d) = scale;
                p.weights.push_back(m);
            }
            auto table = build_table(train, p, fseed, cfg.num_categories);
            std::printf("K=%d identity*%.0f: acc=%.4f\n", k, scale,
                        accuracy(test, table, p, fseed));
        }
    }
    // trained variants
    for (double lr : {0.02, 0.05, 0.1}) {
        for (int epochs : {20, 60}) {
            ObjectTrainConfig oc;
            oc.epochs = epochs;
            oc.learning_rate = lr;
            oc.feature_seed = fseed;
            auto res = train_object_embedder(train, test, oc);
            std::printf("trained lr=%.2f epochs=%d: acc=%.4f loss %.3f->%.3f\n", lr, epochs,
                        res.holdout_accuracy, res.loss_history.front(), res.loss_history.back());
        }
    }
    return 0;
}
