// scratch harness for trainer calibration; not part of the shipped CLI
#include <chrono>
#include <cstdio>

#include "revolt/object_embed.hpp"
#include "revolt/region_embed.hpp"
#include "revolt/region_rollout.hpp"

using namespace revolt;
using Clock = std::chrono::steady_clock;

static double secs(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
    int houses = argc > 1 ? std::atoi(argv[1]) : 500;
    int obj_epochs = argc > 2 ? std::atoi(argv[2]) : 120;
    int reg_epochs = argc > 3 ? std::atoi(argv[3]) : 150;
    int roll_epochs = argc > 4 ? std::atoi(argv[4]) : 60;

    auto cfg = GeneratorConfig::defaults();
    std::vector<HouseSpec> train, test;
    for (uint64_t s = 0; s < uint64_t(houses); ++s) {
        HouseSpec h = generate_house(s, cfg);
        (is_test_seed(s) ? test : train).push_back(std::move(h));
    }
    std::printf("houses: %zu train, %zu test\n", train.size(), test.size());

    auto t0 = Clock::now();
    ObjectTrainConfig oc;
    oc.epochs = obj_epochs;
    auto obj = train_object_embedder(train, test, oc);
    auto t1 = Clock::now();
    std::printf("[object] epochs=%d acc=%.4f loss %.4f -> %.4f (%.1fs)\n", obj_epochs,
                obj.holdout_accuracy, obj.loss_history.empty() ? 0 : obj.loss_history.front(),
                obj.loss_history.empty() ? 0 : obj.loss_history.back(), secs(t0, t1));

    RegionTrainConfig rc;
    rc.epochs = reg_epochs;
    auto reg = train_region_embedder(train, test, obj.table, rc);
    auto t2 = Clock::now();
    std::printf("[region] epochs=%d membership=%.4f classification=%.4f loss %.4f -> %.4f (%.1fs)\n",
                reg_epochs, reg.membership_accuracy, reg.classification_accuracy,
                reg.loss_history.empty() ? 0 : reg.loss_history.front(),
                reg.loss_history.empty() ? 0 : reg.loss_history.back(), secs(t1, t2));

    RolloutTrainConfig lc;
    lc.epochs = roll_epochs;
    auto roll = train_rollout(train, test, reg.label_table, lc);
    auto t3 = Clock::now();
    std::printf("[rollout] epochs=%d top1=%.4f loss %.4f -> %.4f (%.1fs)\n", roll_epochs,
                roll.holdout_top1, roll.loss_history.empty() ? 0 : roll.loss_history.front(),
                roll.loss_history.empty() ? 0 : roll.loss_history.back(), secs(t2, t3));
    return 0;
}
