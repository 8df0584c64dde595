#pragma once

#include <vector>

#include "revolt/house.hpp"
#include "revolt/numeric.hpp"

namespace revolt {

constexpr int kEmbedDim = 16;

// Unit-norm pseudo-random feature vector, deterministic in
// (category, feature_seed). Stands in for pretrained word vectors.
Vec category_features(int category, uint64_t feature_seed);

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double weight = 0.0; // exp(-d / lambda), always in (0, 1]
};

// Object-level relation graph of one house: a clique per room, plus one
// cross-room edge per door between the two objects nearest that door.
struct ObjectGraph {
    std::vector<int> category;  // per node
    std::vector<int> room;      // per node
    std::vector<Vec2> position; // per node
    std::vector<Vec> features;  // x_v, kEmbedDim each
    std::vector<WeightedEdge> edges;
    std::vector<std::vector<std::pair<int, double>>> neighbors; // node -> (other, weight)

    int node_count() const { return int(category.size()); }
};

// One room's objects with intra-room weighted edges; node indices are local.
struct RegionSubgraph {
    int room_id = 0;
    int label = 0;
    std::vector<int> categories;
    std::vector<WeightedEdge> edges;

    bool empty() const { return categories.empty(); }
};

// A house as a node sequence: BFS room order from the entrance plus, per
// room, the binary adjacency step against all earlier rooms.
struct HouseSequence {
    std::vector<int> order;                            // room ids, BFS from entrance
    std::vector<std::vector<uint8_t>> adjacency_steps; // step i has i entries
    std::vector<int> labels;                           // per ordered room
};

enum class OrderPolicy { BfsFromEntrance };

double edge_weight(double distance, double lambda);

ObjectGraph extract_object_graph(const HouseSpec& house, uint64_t feature_seed);

std::vector<RegionSubgraph> extract_region_subgraphs(const HouseSpec& house);

HouseSequence extract_house_sequence(const HouseSpec& house,
                                     OrderPolicy order = OrderPolicy::BfsFromEntrance);

// Inverse of extract_house_sequence: symmetric adjacency lists keyed by the
// original room ids.
std::vector<std::vector<int>> rebuild_connectivity(const HouseSequence& seq);

} // namespace revolt
