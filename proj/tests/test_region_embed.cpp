#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "revolt/region_embed.hpp"

using namespace revolt;

namespace {

CategoryEmbeddingTable toy_table(int num_cats, uint64_t seed) {
    CategoryEmbeddingTable t;
    Rng rng(seed);
    for (int c = 0; c < num_cats; ++c) {
        Vec v(kEmbedDim);
        for (double& x : v) x = rng.uniform(-0.5, 0.5);
        t.vectors.push_back(v);
        t.present.push_back(1);
    }
    return t;
}

} // namespace

TEST_CASE("embed_region: single object is sigmoid(W z)") {
    auto table = toy_table(4, 1);
    auto params = RegionEmbedderParams::init(3, 8, 2);
    RegionSubgraph sub;
    sub.label = 1;
    sub.categories = {2};
    Vec r = embed_region(sub, table, params);
    Vec s = matvec(params.gcn, table.of(2));
    for (int d = 0; d < kEmbedDim; ++d) CHECK(r[d] == doctest::Approx(sigmoid(s[d])));
}

TEST_CASE("embed_region rejects empty regions") {
    auto table = toy_table(4, 1);
    auto params = RegionEmbedderParams::init(3, 8, 2);
    RegionSubgraph sub;
    CHECK_THROWS_AS(embed_region(sub, table, params), std::invalid_argument);
}

TEST_CASE("embed_region is invariant under member permutation") {
    auto table = toy_table(6, 3);
    auto params = RegionEmbedderParams::init(3, 8, 2);
    RegionSubgraph sub;
    sub.label = 0;
    sub.categories = {1, 3, 5};
    sub.edges = {{0, 1, 0.8}, {1, 2, 0.5}, {0, 2, 0.3}};

    RegionSubgraph perm;
    perm.label = 0;
    perm.categories = {5, 1, 3}; // old indices 2, 0, 1
    perm.edges = {{1, 2, 0.8}, {2, 0, 0.5}, {1, 0, 0.3}};

    Vec a = embed_region(sub, table, params);
    Vec b = embed_region(perm, table, params);
    for (int d = 0; d < kEmbedDim; ++d) CHECK(a[d] == doctest::Approx(b[d]).epsilon(1e-12));
}

TEST_CASE("embed_region matches the normalize-propagate-pool oracle") {
    auto table = toy_table(5, 5);
    auto params = RegionEmbedderParams::init(3, 8, 5);
    RegionSubgraph sub;
    sub.label = 2;
    sub.categories = {0, 2, 4};
    sub.edges = {{0, 1, 0.9}, {1, 2, 0.4}};

    // straight-line oracle
    int m = 3;
    double a[3][3] = {{1.0, 0.9, 0.0}, {0.9, 1.0, 0.4}, {0.0, 0.4, 1.0}};
    double deg[3];
    for (int i = 0; i < m; ++i) deg[i] = a[i][0] + a[i][1] + a[i][2];
    Vec pooled(kEmbedDim, 0.0);
    for (int i = 0; i < m; ++i) {
        Vec prop(kEmbedDim, 0.0);
        for (int j = 0; j < m; ++j) {
            double w = a[i][j] / std::sqrt(deg[i] * deg[j]);
            const Vec& z = table.of(sub.categories[j]);
            for (int d = 0; d < kEmbedDim; ++d) prop[d] += w * z[d];
        }
        Vec s = matvec(params.gcn, prop);
        for (int d = 0; d < kEmbedDim; ++d) pooled[d] += sigmoid(s[d]) / double(m);
    }

    Vec r = embed_region(sub, table, params);
    for (int d = 0; d < kEmbedDim; ++d) CHECK(r[d] == doctest::Approx(pooled[d]).epsilon(1e-12));
}

TEST_CASE("loss_region: member limit and uniform-classifier scaling") {
    auto params = RegionEmbedderParams::init(4, 8, 7);
    // freeze the classifier to uniform output
    std::fill(params.mlp_w2.data.begin(), params.mlp_w2.data.end(), 0.0);
    std::fill(params.mlp_b2.data.begin(), params.mlp_b2.data.end(), 0.0);

    Vec r(kEmbedDim, 0.0);
    r[0] = 60.0;
    Vec member(kEmbedDim, 0.0);
    member[0] = 1.0; // r . member huge -> membership term ~ 0
    Vec neg(kEmbedDim, 0.0);
    neg[1] = 1.0; // r . neg = 0 -> each negative contributes ln 2

    int q = 3, batch_n = 5;
    double loss = loss_region(r, {member}, {neg}, 2, params, q, 4, batch_n);
    double expected = 0.0 + q * std::log(2.0) + std::log(4.0) / batch_n;
    CHECK(loss == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("loss_region equals an oracle summation on a fixed instance") {
    auto params = RegionEmbedderParams::init(3, 8, 11);
    Rng rng(11);
    Vec r(kEmbedDim);
    for (double& x : r) x = rng.uniform(-1.0, 1.0);
    std::vector<Vec> members, pool;
    for (int i = 0; i < 2; ++i) {
        Vec v(kEmbedDim);
        for (double& x : v) x = rng.uniform(-0.5, 0.5);
        members.push_back(v);
    }
    for (int i = 0; i < 3; ++i) {
        Vec v(kEmbedDim);
        for (double& x : v) x = rng.uniform(-0.5, 0.5);
        pool.push_back(v);
    }
    int q = 2, label = 1, batch_n = 3;
    uint64_t seed = 11;
    double got = loss_region(r, members, pool, label, params, q, seed, batch_n);

    double want = 0.0;
    auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    for (const auto& z : members) {
        double s = 0.0;
        for (int d = 0; d < kEmbedDim; ++d) s += r[d] * z[d];
        want += -std::log(sig(s));
    }
    Rng nr(Rng::mix(seed, 0x4e656753ULL));
    for (int i = 0; i < q; ++i) {
        const Vec& z = pool[nr.uniform_int(3)];
        double s = 0.0;
        for (int d = 0; d < kEmbedDim; ++d) s += r[d] * z[d];
        want += -std::log(sig(-s));
    }
    Vec logits = label_logits(r, params);
    double mx = *std::max_element(logits.begin(), logits.end());
    double lse = 0.0;
    for (double v : logits) lse += std::exp(v - mx);
    lse = mx + std::log(lse);
    want += -(logits[label] - lse) / batch_n;

    CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("pool_by_label mirrors category pooling") {
    Vec a(kEmbedDim, 2.0), b(kEmbedDim, 4.0), c(kEmbedDim, 9.0);
    auto t1 = pool_by_label({a}, {0}, 2);
    CHECK(t1.vectors[0] == a);
    CHECK(t1.present[1] == 0);
    auto t2 = pool_by_label({a, a}, {1, 1}, 2);
    CHECK(t2.vectors[1] == a);
    auto t3 = pool_by_label({a, b, c}, {0, 0, 0}, 1);
    for (double v : t3.vectors[0]) CHECK(v == doctest::Approx(5.0));
}

TEST_CASE("region pipeline gradient passes finite differences") {
    auto cfg = GeneratorConfig::defaults();
    cfg.min_rooms = 2;
    cfg.max_rooms = 3;
    auto table = toy_table(30, 21);
    for (uint64_t seed : {4, 5, 6}) {
        HouseSpec h = generate_house(seed, cfg);
        auto subs = extract_region_subgraphs(h);
        REQUIRE(!subs.empty());
        const RegionSubgraph& sub = subs[0];
        auto params = RegionEmbedderParams::init(10, 6, seed);

        auto mats = params.matrices();
        Vec flat;
        for (auto* m : mats) flat.insert(flat.end(), m->data.begin(), m->data.end());

        LossFn fn = [&](const Vec& p, Vec* grad) {
            RegionEmbedderParams local = params;
            auto lm = local.matrices();
            size_t off = 0;
            for (auto* m : lm) {
                std::copy(p.begin() + off, p.begin() + off + m->data.size(), m->data.begin());
                off += m->data.size();
            }
            std::vector<Matrix> grads;
            double loss =
                region_loss_and_grad(sub, table, local, 3, 13, 2, grad ? &grads : nullptr);
            if (grad) {
                grad->clear();
                for (const auto& gm : grads)
                    grad->insert(grad->end(), gm.data.begin(), gm.data.end());
            }
            return loss;
        };
        CHECK(check_gradient(fn, flat, 1e-5) < 1e-4);
    }
}

TEST_CASE("untrained region classifier sits near chance") {
    auto cfg = GeneratorConfig::defaults();
    std::vector<HouseSpec> train, test;
    for (uint64_t s = 0; s < 8; ++s) train.push_back(generate_house(s, cfg));
    for (uint64_t s = 100; s < 130; ++s) test.push_back(generate_house(s, cfg));
    auto table = toy_table(30, 5);
    RegionTrainConfig rc;
    rc.epochs = 0;
    auto result = train_region_embedder(train, test, table, rc);
    CHECK(result.classification_accuracy < 0.1 + 0.1 + 0.05); // 1/|labels| +- 0.1
}
