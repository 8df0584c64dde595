#include "revolt/house.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "revolt/rng.hpp"

namespace revolt {

bool HouseSpec::rooms_adjacent(int a, int b) const {
    const auto& adj = connectivity[a];
    return std::binary_search(adj.begin(), adj.end(), b);
}

Rect HouseSpec::bounding_box() const {
    Rect r{1e300, 1e300, -1e300, -1e300};
    for (const auto& room : rooms) {
        r.xmin = std::min(r.xmin, room.bounds.xmin);
        r.ymin = std::min(r.ymin, room.bounds.ymin);
        r.xmax = std::max(r.xmax, room.bounds.xmax);
        r.ymax = std::max(r.ymax, room.bounds.ymax);
    }
    return r;
}

double HouseSpec::mean_room_diagonal() const {
    double s = 0.0;
    for (const auto& r : rooms) s += r.bounds.diagonal();
    return rooms.empty() ? 1.0 : s / double(rooms.size());
}

std::vector<const SceneObject*> HouseSpec::objects_in_room(int room_id) const {
    std::vector<const SceneObject*> out;
    for (const auto& o : objects)
        if (o.room == room_id) out.push_back(&o);
    return out;
}

void GeneratorConfig::validate() const {
    if (min_rooms < 1 || max_rooms < min_rooms)
        throw std::invalid_argument("generator config: room count range invalid");
    if (num_labels < 1 || int(label_transition.size()) != num_labels)
        throw std::invalid_argument("generator config: label transition table invalid");
    for (const auto& row : label_transition) {
        if (int(row.size()) != num_labels)
            throw std::invalid_argument("generator config: transition row size mismatch");
        double s = 0.0;
        for (double p : row) s += p;
        if (s <= 0.0) throw std::invalid_argument("generator config: transition row sums to 0");
    }
    if (int(placement.size()) != num_labels)
        throw std::invalid_argument("generator config: placement table invalid");
    for (const auto& row : placement) {
        if (int(row.size()) != num_categories)
            throw std::invalid_argument("generator config: placement row size mismatch");
        double s = 0.0;
        for (double p : row) s += p;
        if (s <= 0.0) throw std::invalid_argument("generator config: empty category distribution");
    }
    if (entrance_label < 0 || entrance_label >= num_labels)
        throw std::invalid_argument("generator config: entrance label out of range");
}

namespace {

enum Label {
    kHallway = 0,
    kLiving = 1,
    kKitchen = 2,
    kDining = 3,
    kBedroom = 4,
    kBathroom = 5,
    kOffice = 6,
    kCloset = 7,
    kLaundry = 8,
    kGarage = 9
};

enum Cat {
    kCoatRack = 0,
    kMirror = 1,
    kPlant = 2,
    kSofa = 3,
    kCoffeeTable = 4,
    kTvStand = 5,
    kBookshelf = 6,
    kFridge = 7,
    kStove = 8,
    kKitchenCabinet = 9,
    kCounter = 10,
    kDiningTable = 11,
    kDiningChair = 12,
    kSideboard = 13,
    kBed = 14,
    kNightstand = 15,
    kWardrobe = 16,
    kDresser = 17,
    kToilet = 18,
    kSink = 19,
    kBathtub = 20,
    kShower = 21,
    kTowelRack = 22,
    kDesk = 23,
    kOfficeChair = 24,
    kComputer = 25,
    kWasher = 26,
    kDryer = 27,
    kStorageBox = 28,
    kWorkbench = 29
};

} // namespace

GeneratorConfig GeneratorConfig::defaults() {
    GeneratorConfig c;
    c.label_names = {"hallway", "living_room", "kitchen",  "dining_room", "bedroom",
                     "bathroom", "office",      "closet",   "laundry",     "garage"};
    c.category_names = {"coat_rack",   "mirror",       "plant",        "sofa",
                        "coffee_table", "tv_stand",     "bookshelf",    "fridge",
                        "stove",        "kitchen_cabinet", "counter",   "dining_table",
                        "dining_chair", "sideboard",    "bed",          "nightstand",
                        "wardrobe",     "dresser",      "toilet",       "sink",
                        "bathtub",      "shower",       "towel_rack",   "desk",
                        "office_chair", "computer",     "washer",       "dryer",
                        "storage_box",  "workbench"};

    c.label_transition.assign(10, std::vector<double>(10, 0.0));
    auto& t = c.label_transition;
    t[kHallway][kBedroom] = 0.45;
    t[kHallway][kLiving] = 0.06;
    t[kHallway][kKitchen] = 0.10;
    t[kHallway][kOffice] = 0.06;
    t[kHallway][kBathroom] = 0.05;
    t[kHallway][kGarage] = 0.04;

    t[kLiving][kDining] = 0.45;
    t[kLiving][kKitchen] = 0.06;
    t[kLiving][kOffice] = 0.15;
    t[kLiving][kHallway] = 0.10;
    t[kLiving][kLiving] = 0.05;

    t[kKitchen][kDining] = 0.50;
    t[kKitchen][kLaundry] = 0.06;
    t[kKitchen][kGarage] = 0.15;
    t[kKitchen][kHallway] = 0.05;

    t[kDining][kKitchen] = 0.45;
    t[kDining][kLiving] = 0.35;
    t[kDining][kCloset] = 0.10;
    t[kDining][kHallway] = 0.10;

    t[kBedroom][kBathroom] = 0.50;
    t[kBedroom][kCloset] = 0.38;
    t[kBedroom][kBedroom] = 0.06;
    t[kBedroom][kOffice] = 0.06;

    t[kBathroom][kCloset] = 0.60;
    t[kBathroom][kLaundry] = 0.20;
    t[kBathroom][kHallway] = 0.20;

    t[kOffice][kCloset] = 0.50;
    t[kOffice][kBathroom] = 0.06;
    t[kOffice][kGarage] = 0.06;

    t[kCloset][kCloset] = 0.45;
    t[kCloset][kBathroom] = 0.06;
    t[kCloset][kLaundry] = 0.15;
    t[kCloset][kGarage] = 0.15;

    t[kLaundry][kGarage] = 0.50;
    t[kLaundry][kCloset] = 0.06;
    t[kLaundry][kBathroom] = 0.20;

    t[kGarage][kLaundry] = 0.45;
    t[kGarage][kCloset] = 0.35;
    t[kGarage][kOffice] = 0.20;

    // room vocabularies are label-exclusive and nearly deterministic:
    // stereotyped compositions keep instance embeddings clustered tightly
    // enough for nearest-centroid classification while co-occurrence stays
    // trivially learnable
    c.placement.assign(10, std::vector<double>(30, 0.0));
    auto& p = c.placement;
    p[kHallway][kCoatRack] = 0.99;
    p[kHallway][kMirror] = 0.96;
    p[kHallway][kPlant] = 0.93;

    p[kLiving][kSofa] = 0.99;
    p[kLiving][kCoffeeTable] = 0.96;
    p[kLiving][kTvStand] = 0.93;
    p[kLiving][kBookshelf] = 0.90;

    p[kKitchen][kFridge] = 0.99;
    p[kKitchen][kStove] = 0.96;
    p[kKitchen][kKitchenCabinet] = 0.93;
    p[kKitchen][kCounter] = 0.90;

    p[kDining][kDiningTable] = 0.99;
    p[kDining][kDiningChair] = 0.96;
    p[kDining][kSideboard] = 0.93;

    p[kBedroom][kBed] = 0.99;
    p[kBedroom][kNightstand] = 0.96;
    p[kBedroom][kWardrobe] = 0.93;

    p[kBathroom][kToilet] = 0.99;
    p[kBathroom][kSink] = 0.96;
    p[kBathroom][kBathtub] = 0.93;
    p[kBathroom][kShower] = 0.90;

    p[kOffice][kDesk] = 0.99;
    p[kOffice][kOfficeChair] = 0.96;
    p[kOffice][kComputer] = 0.93;

    p[kCloset][kDresser] = 0.99;
    p[kCloset][kStorageBox] = 0.96;
    p[kCloset][kTowelRack] = 0.93;

    p[kLaundry][kWasher] = 0.99;
    p[kLaundry][kDryer] = 0.96;

    p[kGarage][kWorkbench] = 0.99;

    c.target_categories = {kSofa,       kCoffeeTable, kTvStand, kBookshelf, kFridge,
                           kStove,      kCounter,     kDiningTable, kDiningChair, kBed,
                           kNightstand, kWardrobe,    kDresser, kToilet,    kSink,
                           kBathtub,    kShower,      kDesk,    kComputer,  kWasher,
                           kWorkbench};
    c.small_mode_targets = {kSofa, kBed, kToilet, kFridge, kDiningTable, kDesk};
    return c;
}

bool is_test_seed(uint64_t seed) { return seed % 5 == 4; }

namespace {

int sample_categorical(const std::vector<double>& probs, Rng& rng) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return int(i);
    }
    return int(probs.size()) - 1;
}

// Shared-wall overlap of two axis-aligned rooms; empty interval when the
// rooms do not touch along a wall.
struct WallOverlap {
    bool vertical = false; // shared wall is a vertical line
    double line = 0.0;     // x (vertical) or y (horizontal) of the wall
    double lo = 0.0, hi = 0.0;
    double span() const { return hi - lo; }
};

std::optional<WallOverlap> shared_wall(const Rect& a, const Rect& b) {
    const double tol = 1e-9;
    if (std::abs(a.xmax - b.xmin) < tol || std::abs(b.xmax - a.xmin) < tol) {
        WallOverlap w;
        w.vertical = true;
        w.line = std::abs(a.xmax - b.xmin) < tol ? a.xmax : b.xmax;
        w.lo = std::max(a.ymin, b.ymin);
        w.hi = std::min(a.ymax, b.ymax);
        if (w.span() > tol) return w;
    }
    if (std::abs(a.ymax - b.ymin) < tol || std::abs(b.ymax - a.ymin) < tol) {
        WallOverlap w;
        w.vertical = false;
        w.line = std::abs(a.ymax - b.ymin) < tol ? a.ymax : b.ymax;
        w.lo = std::max(a.xmin, b.xmin);
        w.hi = std::min(a.xmax, b.xmax);
        if (w.span() > tol) return w;
    }
    return std::nullopt;
}

bool split_into_rooms(int n, double min_side, Rng& rng, double scale, std::vector<Rect>& out) {
    double w = std::sqrt(double(n)) * rng.uniform(3.8, 4.3) * scale;
    double h = std::sqrt(double(n)) * rng.uniform(3.2, 3.7) * scale;
    std::vector<Rect> leaves{{0.0, 0.0, w, h}};
    while (int(leaves.size()) < n) {
        int best = -1;
        double best_area = 0.0;
        for (size_t i = 0; i < leaves.size(); ++i) {
            double side = std::max(leaves[i].width(), leaves[i].height());
            if (side >= 2.0 * min_side && leaves[i].area() > best_area) {
                best_area = leaves[i].area();
                best = int(i);
            }
        }
        if (best < 0) return false;
        Rect r = leaves[best];
        bool split_x = r.width() >= r.height();
        double side = split_x ? r.width() : r.height();
        double fmin = std::max(0.35, min_side / side);
        double fmax = std::min(0.65, 1.0 - min_side / side);
        double f = rng.uniform(fmin, fmax);
        Rect left = r, right = r;
        if (split_x) {
            double cut = r.xmin + f * r.width();
            left.xmax = cut;
            right.xmin = cut;
        } else {
            double cut = r.ymin + f * r.height();
            left.ymax = cut;
            right.ymin = cut;
        }
        leaves[best] = left;
        leaves.push_back(right);
    }
    out = leaves;
    return true;
}

// touching graph must be connected so the door spanning tree can reach
// every room
bool connected(const std::vector<std::vector<int>>& adj) {
    if (adj.empty()) return true;
    std::vector<bool> seen(adj.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    size_t count = 1;
    while (!q.empty()) {
        int cur = q.front();
        q.pop();
        for (int nb : adj[cur])
            if (!seen[nb]) {
                seen[nb] = true;
                count++;
                q.push(nb);
            }
    }
    return count == adj.size();
}

} // namespace

HouseSpec generate_house(uint64_t seed, const GeneratorConfig& config) {
    config.validate();
    Rng rng(Rng::mix(seed, 0x486f757365ULL)); // house stream

    HouseSpec house;
    house.seed = seed;

    int n = config.min_rooms + rng.uniform_int(config.max_rooms - config.min_rooms + 1);
    double need = config.door_width + 0.2;

    std::vector<Rect> leaves;
    std::vector<std::vector<int>> touching;
    bool layout_ok = false;
    for (int attempt = 0; attempt < 32 && !layout_ok; ++attempt) {
        double scale = 1.0 + 0.1 * attempt;
        if (!split_into_rooms(n, config.min_room_side, rng, scale, leaves)) continue;
        touching.assign(n, {});
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                auto w = shared_wall(leaves[a], leaves[b]);
                if (w && w->span() >= need) {
                    touching[a].push_back(b);
                    touching[b].push_back(a);
                }
            }
        layout_ok = connected(touching);
    }
    if (!layout_ok) throw std::runtime_error("generate_house: could not partition rooms");

    house.rooms.resize(n);
    for (int i = 0; i < n; ++i) house.rooms[i] = Room{i, 0, leaves[i]};

    // entrance: room nearest the south-west corner
    int entrance = 0;
    double best = 1e300;
    for (int i = 0; i < n; ++i) {
        Vec2 c = leaves[i].center();
        if (c.x + c.y < best) {
            best = c.x + c.y;
            entrance = i;
        }
    }
    house.entrance_room = entrance;

    // spanning tree by randomized BFS; tree edges become doors, labels grow
    // along tree arcs via the transition table
    std::vector<int> label(n, -1);
    std::vector<std::pair<int, int>> tree_edges;
    std::vector<bool> seen(n, false);
    std::queue<int> frontier;
    frontier.push(entrance);
    seen[entrance] = true;
    label[entrance] = config.entrance_label;
    while (!frontier.empty()) {
        int cur = frontier.front();
        frontier.pop();
        std::vector<int> nbrs = touching[cur];
        for (size_t i = nbrs.size(); i > 1; --i) std::swap(nbrs[i - 1], nbrs[rng.uniform_int(int(i))]);
        for (int nb : nbrs) {
            if (seen[nb]) continue;
            seen[nb] = true;
            label[nb] = sample_categorical(config.label_transition[label[cur]], rng);
            tree_edges.push_back({std::min(cur, nb), std::max(cur, nb)});
            frontier.push(nb);
        }
    }
    // BSP leaves always form a connected touching graph, so BFS reaches all
    for (int i = 0; i < n; ++i) house.rooms[i].label = label[i];

    // extra doors create loops
    std::vector<std::pair<int, int>> door_pairs = tree_edges;
    for (int a = 0; a < n; ++a)
        for (int b : touching[a]) {
            if (b <= a) continue;
            std::pair<int, int> e{a, b};
            if (std::find(door_pairs.begin(), door_pairs.end(), e) != door_pairs.end()) continue;
            if (rng.uniform() < config.extra_door_prob) door_pairs.push_back(e);
        }
    std::sort(door_pairs.begin(), door_pairs.end());

    house.connectivity.assign(n, {});
    for (auto [a, b] : door_pairs) {
        auto w = shared_wall(leaves[a], leaves[b]);
        double half = 0.5 * config.door_width;
        double lo = w->lo + half + 0.05;
        double hi = w->hi - half - 0.05;
        double at = lo >= hi ? 0.5 * (w->lo + w->hi) : rng.uniform(lo, hi);
        Vec2 pos = w->vertical ? Vec2{w->line, at} : Vec2{at, w->line};
        house.doors.push_back(Door{a, b, pos});
        house.connectivity[a].push_back(b);
        house.connectivity[b].push_back(a);
    }
    for (auto& adj : house.connectivity) std::sort(adj.begin(), adj.end());

    // objects: independent draws from the label's placement row; a room that
    // comes up empty gets the row's most likely category so that every room
    // contributes to the relation graphs
    int next_obj = 0;
    for (int r = 0; r < n; ++r) {
        const auto& row = config.placement[label[r]];
        double margin = config.object_radius + 0.17;
        Rect inner = leaves[r].shrunk(margin);
        // furniture spreads toward walls and corners: a separation floor
        // proportional to room size keeps same-room objects apart
        double sep = std::clamp(0.5 * std::min(inner.width(), inner.height()), 0.8, 1.8);
        std::vector<Vec2> placed;
        auto try_place = [&](int cat) {
            for (int attempt = 0; attempt < 80; ++attempt) {
                Vec2 p{rng.uniform(inner.xmin, inner.xmax), rng.uniform(inner.ymin, inner.ymax)};
                bool ok = true;
                for (const auto& q : placed)
                    if (p.dist(q) < sep) ok = false;
                for (const auto& d : house.doors)
                    if ((d.room_a == r || d.room_b == r) && p.dist(d.pos) < 0.75) ok = false;
                if (!ok) continue;
                placed.push_back(p);
                house.objects.push_back(SceneObject{next_obj++, cat, p, r});
                return true;
            }
            return false;
        };
        size_t before = house.objects.size();
        for (int c = 0; c < config.num_categories; ++c)
            if (row[c] > 0.0 && rng.uniform() < row[c]) try_place(c);
        if (house.objects.size() == before) {
            int fallback = int(std::max_element(row.begin(), row.end()) - row.begin());
            if (!try_place(fallback)) // cramped room: accept the center
                house.objects.push_back(SceneObject{next_obj++, fallback, inner.center(), r});
        }
    }
    return house;
}

} // namespace revolt
