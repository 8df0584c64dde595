#include "revolt/geometry.hpp"

#include <algorithm>

namespace revolt {

std::optional<double> ray_segment(const Vec2& origin, const Vec2& dir, const Segment& seg,
                                  double t_min) {
    // solve origin + t*dir = a + u*(b-a), t >= t_min, u in [0,1]
    Vec2 e = seg.b - seg.a;
    double denom = dir.cross(e);
    if (std::abs(denom) < 1e-14) return std::nullopt; // parallel
    Vec2 ao = seg.a - origin;
    double t = ao.cross(e) / denom;
    double u = ao.cross(dir) / denom;
    if (t < t_min || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    return t;
}

std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Vec2& center,
                                 double radius, double t_min) {
    Vec2 oc = origin - center;
    double a = dir.dot(dir);
    double b = 2.0 * oc.dot(dir);
    double c = oc.dot(oc) - radius * radius;
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t1 = (-b - sq) / (2.0 * a);
    double t2 = (-b + sq) / (2.0 * a);
    if (t1 >= t_min) return t1;
    if (t2 >= t_min) return t2;
    return std::nullopt;
}

double point_segment_distance(const Vec2& p, const Segment& seg) {
    Vec2 e = seg.b - seg.a;
    double len2 = e.dot(e);
    if (len2 < 1e-18) return p.dist(seg.a);
    double t = std::clamp((p - seg.a).dot(e) / len2, 0.0, 1.0);
    return p.dist(seg.a + e * t);
}

static int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    double v = (b - a).cross(c - a);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
}

static bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

bool segments_intersect(const Segment& s1, const Segment& s2) {
    int o1 = orient(s1.a, s1.b, s2.a);
    int o2 = orient(s1.a, s1.b, s2.b);
    int o3 = orient(s2.a, s2.b, s1.a);
    int o4 = orient(s2.a, s2.b, s1.b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(s1.a, s1.b, s2.a)) return true;
    if (o2 == 0 && on_segment(s1.a, s1.b, s2.b)) return true;
    if (o3 == 0 && on_segment(s2.a, s2.b, s1.a)) return true;
    if (o4 == 0 && on_segment(s2.a, s2.b, s1.b)) return true;
    return false;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) {
                              return std::abs(a.x - b.x) < 1e-12 && std::abs(a.y - b.y) < 1e-12;
                          }),
              pts.end());
    size_t n = pts.size();
    if (n < 3) return pts;

    std::vector<Vec2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 1e-12) k--;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) { // upper
        while (k >= t && (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 1e-12) k--;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& hull, double eps) {
    size_t n = hull.size();
    if (n == 0) return false;
    if (n == 1) return p.dist(hull[0]) <= eps;
    if (n == 2) return point_segment_distance(p, {hull[0], hull[1]}) <= eps;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[(i + 1) % n];
        if ((b - a).cross(p - a) < -eps) return false;
    }
    return true;
}

double polygon_distance(const Vec2& p, const std::vector<Vec2>& hull) {
    size_t n = hull.size();
    if (n == 0) return 0.0;
    if (n == 1) return p.dist(hull[0]);
    double d = 1e300;
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, point_segment_distance(p, {hull[i], hull[(i + 1) % (n == 2 ? 2 : n)]}));
    return d;
}

bool segment_hits_polygon(const Segment& s, const std::vector<Vec2>& hull, double inflate) {
    size_t n = hull.size();
    if (n == 0) return false;
    if (point_in_convex_polygon(s.a, hull, inflate)) return true;
    if (point_in_convex_polygon(s.b, hull, inflate)) return true;
    if (n == 1) return point_segment_distance(hull[0], s) <= inflate;
    for (size_t i = 0; i < n; ++i) {
        Segment edge{hull[i], hull[(i + 1) % n]};
        if (segments_intersect(s, edge)) return true;
        if (inflate > 0.0) {
            if (point_segment_distance(edge.a, s) <= inflate) return true;
            if (point_segment_distance(s.a, edge) <= inflate) return true;
            if (point_segment_distance(s.b, edge) <= inflate) return true;
        }
    }
    return false;
}

} // namespace revolt
