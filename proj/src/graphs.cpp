#include "revolt/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace revolt {

Vec category_features(int category, uint64_t feature_seed) {
    Rng rng(Rng::mix(feature_seed, 0x46656174ULL + uint64_t(category) * 0x10001ULL));
    Vec x(kEmbedDim);
    double norm2 = 0.0;
    for (auto& v : x) {
        v = rng.gauss();
        norm2 += v * v;
    }
    double inv = 1.0 / std::sqrt(std::max(norm2, 1e-12));
    for (auto& v : x) v *= inv;
    return x;
}

double edge_weight(double distance, double lambda) {
    return std::exp(-distance / std::max(lambda, 1e-9));
}

ObjectGraph extract_object_graph(const HouseSpec& house, uint64_t feature_seed) {
    ObjectGraph g;
    double lambda = house.mean_room_diagonal();

    g.category.reserve(house.objects.size());
    for (const auto& o : house.objects) {
        g.category.push_back(o.category);
        g.room.push_back(o.room);
        g.position.push_back(o.pos);
        g.features.push_back(category_features(o.category, feature_seed));
    }

    // full clique inside each room
    std::vector<std::vector<int>> by_room(house.rooms.size());
    for (int i = 0; i < g.node_count(); ++i) by_room[g.room[i]].push_back(i);
    for (const auto& members : by_room)
        for (size_t a = 0; a < members.size(); ++a)
            for (size_t b = a + 1; b < members.size(); ++b) {
                double d = g.position[members[a]].dist(g.position[members[b]]);
                g.edges.push_back({members[a], members[b], edge_weight(d, lambda)});
            }

    // one cross-room edge per door, between the two objects nearest the door
    for (const auto& door : house.doors) {
        int pick_a = -1, pick_b = -1;
        double da = 1e300, db = 1e300;
        for (int i : by_room[door.room_a]) {
            double d = g.position[i].dist(door.pos);
            if (d < da) {
                da = d;
                pick_a = i;
            }
        }
        for (int i : by_room[door.room_b]) {
            double d = g.position[i].dist(door.pos);
            if (d < db) {
                db = d;
                pick_b = i;
            }
        }
        if (pick_a < 0 || pick_b < 0) continue; // empty room
        double d = g.position[pick_a].dist(g.position[pick_b]);
        g.edges.push_back({std::min(pick_a, pick_b), std::max(pick_a, pick_b),
                           edge_weight(d, lambda)});
    }

    g.neighbors.assign(g.node_count(), {});
    for (const auto& e : g.edges) {
        g.neighbors[e.u].push_back({e.v, e.weight});
        g.neighbors[e.v].push_back({e.u, e.weight});
    }
    return g;
}

std::vector<RegionSubgraph> extract_region_subgraphs(const HouseSpec& house) {
    double lambda = house.mean_room_diagonal();
    std::vector<RegionSubgraph> subs;
    subs.reserve(house.rooms.size());
    for (const auto& room : house.rooms) {
        RegionSubgraph s;
        s.room_id = room.id;
        s.label = room.label;
        std::vector<Vec2> pos;
        for (const auto& o : house.objects)
            if (o.room == room.id) {
                s.categories.push_back(o.category);
                pos.push_back(o.pos);
            }
        for (size_t a = 0; a < pos.size(); ++a)
            for (size_t b = a + 1; b < pos.size(); ++b)
                s.edges.push_back({int(a), int(b), edge_weight(pos[a].dist(pos[b]), lambda)});
        subs.push_back(std::move(s));
    }
    return subs;
}

HouseSequence extract_house_sequence(const HouseSpec& house, OrderPolicy order) {
    (void)order; // single policy: BFS from the entrance
    HouseSequence seq;
    int n = int(house.rooms.size());
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(house.entrance_room);
    seen[house.entrance_room] = true;
    while (!q.empty()) {
        int cur = q.front();
        q.pop();
        seq.order.push_back(cur);
        for (int nb : house.connectivity[cur]) // sorted, so deterministic
            if (!seen[nb]) {
                seen[nb] = true;
                q.push(nb);
            }
    }
    for (size_t i = 0; i < seq.order.size(); ++i) {
        int room = seq.order[i];
        seq.labels.push_back(house.rooms[room].label);
        std::vector<uint8_t> step(i, 0);
        for (size_t j = 0; j < i; ++j)
            step[j] = house.rooms_adjacent(room, seq.order[j]) ? 1 : 0;
        seq.adjacency_steps.push_back(std::move(step));
    }
    return seq;
}

std::vector<std::vector<int>> rebuild_connectivity(const HouseSequence& seq) {
    int max_id = 0;
    for (int id : seq.order) max_id = std::max(max_id, id);
    std::vector<std::vector<int>> adj(max_id + 1);
    for (size_t i = 0; i < seq.order.size(); ++i)
        for (size_t j = 0; j < seq.adjacency_steps[i].size(); ++j)
            if (seq.adjacency_steps[i][j]) {
                adj[seq.order[i]].push_back(seq.order[j]);
                adj[seq.order[j]].push_back(seq.order[i]);
            }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

} // namespace revolt
