// scratch: vocabulary-design probe for object accuracy
#include <cstdio>
#include <cstdlib>
#include "revolt/object_embed.hpp"
using namespace revolt;

static double run(GeneratorConfig cfg, const char* name, uint64_t fseed) {
    std::vector<HouseSpec> train, test;
    for (uint64_t s = 0; s < 500; ++s)
        (is_test_seed(s) ? test : train).push_back(generate_house(s, cfg));
    ObjectEmbedderParams p;
    Matrix m(kEmbedDim, kEmbedDim);
    for (int d = 0; d < kEmbedDim; ++d) m.at(d, d) = 1.0;
    p.weights.push_back(m);
    std::vector<Vec> all; std::vector<int> cats;
    for (const auto& h : train) {
        ObjectGraph g = extract_object_graph(h, fseed);
        auto z = node_embeddings(g, p);
        all.insert(all.end(), z.begin(), z.end());
        cats.insert(cats.end(), g.category.begin(), g.category.end());
    }
    auto table = pool_by_category(all, cats, cfg.num_categories);
    long correct=0,total=0;
    for (const auto& h : test) {
        ObjectGraph g = extract_object_graph(h, fseed);
        auto z = node_embeddings(g, p);
        for (int v = 0; v < g.node_count(); ++v) {
            int best=-1; double bd=1e300;
            for (int c = 0; c < cfg.num_categories; ++c) {
                if (!table.present[c]) continue;
                double d2=0; for (int k=0;k<16;++k){double df=z[v][k]-table.vectors[c][k];d2+=df*df;}
                if (d2<bd){bd=d2;best=c;}
            }
            total++; if (best==g.category[v]) correct++;
        }
    }
    double acc = double(correct)/double(total);
    std::printf("%-28s acc=%.4f (n=%ld)\n", name, acc, total);
    return acc;
}

int main(int argc, char** argv) {
    uint64_t fs = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 99;
    auto cfg = GeneratorConfig::defaults();
    char name[64];
    std::snprintf(name, sizeof name, "default fseed=%llu", (unsigned long long)fs);
    run(cfg, name, fs);
    return 0;
}
