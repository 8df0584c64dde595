#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace revolt {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const = default;

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
    double dist(const Vec2& o) const { return (*this - o).norm(); }
};

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return a.dist(b); }
};

// Pose in a 2D frame: position plus heading (radians, CCW from +x).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }

    // point given in this pose's local frame, expressed in the parent frame
    Vec2 to_parent(const Vec2& local) const {
        double c = std::cos(theta), s = std::sin(theta);
        return {x + c * local.x - s * local.y, y + s * local.x + c * local.y};
    }

    // parent-frame point expressed in this pose's local frame
    Vec2 to_local(const Vec2& world) const {
        double c = std::cos(theta), s = std::sin(theta);
        double dx = world.x - x, dy = world.y - y;
        return {c * dx + s * dy, -s * dx + c * dy};
    }
};

struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
    double diagonal() const { return std::hypot(width(), height()); }

    bool contains(const Vec2& p, double margin = 0.0) const {
        return p.x >= xmin + margin && p.x <= xmax - margin &&
               p.y >= ymin + margin && p.y <= ymax - margin;
    }

    Rect shrunk(double m) const { return {xmin + m, ymin + m, xmax - m, ymax - m}; }
};

inline double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

// Ray from `origin` along unit-ish `dir`; returns parameter t >= t_min of the
// first intersection with the segment, if any.
std::optional<double> ray_segment(const Vec2& origin, const Vec2& dir, const Segment& seg,
                                  double t_min = 1e-9);

// First intersection of the ray with a circle of radius r at center c.
std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Vec2& center,
                                 double radius, double t_min = 1e-9);

// Distance from point p to segment.
double point_segment_distance(const Vec2& p, const Segment& seg);

// true if segments pq and seg properly intersect or touch
bool segments_intersect(const Segment& s1, const Segment& s2);

// Counter-clockwise convex hull (Andrew monotone chain). Collinear input
// yields the two extreme points. Fewer than 3 distinct points are returned
// as-is (deduplicated, sorted).
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

// true when the polygon (CCW) contains p, boundary inclusive (tolerance eps)
bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& hull, double eps = 1e-9);

// distance from p to the closest point of the hull boundary (0 if degenerate empty)
double polygon_distance(const Vec2& p, const std::vector<Vec2>& hull);

// true if segment intersects (or is inside) the hull inflated by `inflate`
bool segment_hits_polygon(const Segment& s, const std::vector<Vec2>& hull, double inflate);

} // namespace revolt
