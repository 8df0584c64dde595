// scratch: confusion diagnosis for the object embedder
#include <cstdio>
#include <map>
#include "revolt/object_embed.hpp"
using namespace revolt;

int main() {
    auto cfg = GeneratorConfig::defaults();
    uint64_t fseed = 99;
    std::vector<HouseSpec> train, test;
    for (uint64_t s = 0; s < 300; ++s)
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
    std::map<std::pair<int,int>, int> confus;
    std::vector<int> total(30,0), wrong(30,0);
    for (const auto& h : test) {
        ObjectGraph g = extract_object_graph(h, fseed);
        auto z = node_embeddings(g, p);
        for (int v = 0; v < g.node_count(); ++v) {
            int best=-1; double bd=1e300;
            for (int c = 0; c < 30; ++c) {
                if (!table.present[c]) continue;
                double d2=0; for (int k=0;k<16;++k){double df=z[v][k]-table.vectors[c][k];d2+=df*df;}
                if (d2<bd){bd=d2;best=c;}
            }
            total[g.category[v]]++;
            if (best != g.category[v]) { wrong[g.category[v]]++; confus[{g.category[v],best}]++; }
        }
    }
    for (int c=0;c<30;++c) if(total[c])
        std::printf("%-16s total %4d err %5.2f%%\n", cfg.category_names[c].c_str(), total[c], 100.0*wrong[c]/total[c]);
    std::printf("--- top confusions ---\n");
    std::vector<std::tuple<int,int,int>> v;
    for (auto& [k,n] : confus) v.push_back({n,k.first,k.second});
    std::sort(v.rbegin(), v.rend());
    for (size_t i=0;i<v.size()&&i<12;++i)
        std::printf("%s -> %s : %d\n", cfg.category_names[std::get<1>(v[i])].c_str(),
                    cfg.category_names[std::get<2>(v[i])].c_str(), std::get<0>(v[i]));
}
