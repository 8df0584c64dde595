#pragma once

#include <string>
#include <vector>

#include "revolt/geometry.hpp"

namespace revolt {

struct Room {
    int id = 0;
    int label = 0; // region label index
    Rect bounds;
};

struct Door {
    int room_a = 0;
    int room_b = 0;
    Vec2 pos; // midpoint of the opening, on the shared wall
};

struct SceneObject {
    int id = 0;
    int category = 0;
    Vec2 pos;
    int room = 0;
};

// Ground-truth procedural house. Source of all training graphs and of the
// simulated world geometry.
struct HouseSpec {
    uint64_t seed = 0;
    std::vector<Room> rooms;
    std::vector<Door> doors;
    std::vector<SceneObject> objects;
    std::vector<std::vector<int>> connectivity; // sorted adjacency lists, symmetric
    int entrance_room = 0;

    bool rooms_adjacent(int a, int b) const;
    Rect bounding_box() const;
    double mean_room_diagonal() const;
    std::vector<const SceneObject*> objects_in_room(int room_id) const;
};

struct GeneratorConfig {
    int min_rooms = 4;
    int max_rooms = 10;
    int num_labels = 10;
    int num_categories = 30;
    int entrance_label = 0;
    double min_room_side = 2.2;
    double door_width = 0.9;
    double object_radius = 0.18;
    double extra_door_prob = 0.08;
    // label_transition[parent][child]: distribution of a new room's label
    // given the label of the room it was grown from
    std::vector<std::vector<double>> label_transition;
    // placement[label][category]: independent placement probability of one
    // instance of the category in a room of that label
    std::vector<std::vector<double>> placement;
    std::vector<std::string> label_names;
    std::vector<std::string> category_names;
    std::vector<int> target_categories;
    std::vector<int> small_mode_targets;

    static GeneratorConfig defaults();
    void validate() const;
};

// Deterministic in (seed, config). Produces a connected house of
// non-overlapping axis-aligned rooms with doors on shared walls, labels
// drawn along the door spanning tree, and objects drawn from the
// label-conditional placement table (a room that would come up empty
// receives its label's highest-probability category instead).
HouseSpec generate_house(uint64_t seed, const GeneratorConfig& config);

// 80/20 split by house seed; test houses are never seen by a trainer.
bool is_test_seed(uint64_t seed);

} // namespace revolt
