#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpm {

using NodeId = std::uint32_t;
using BlockId = std::uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline double squared_norm(Point p) { return p.x * p.x + p.y * p.y; }
inline double squared_distance(Point a, Point b) { return squared_norm(a - b); }
inline double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }

/// Latent positions indexed by node id.
using Embedding = std::vector<Point>;

/// Axis-aligned square [lo, hi]^2 holding every latent position.
struct Domain {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(Point p) const {
        return p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi;
    }
    Point center() const { return {0.5 * (lo + hi), 0.5 * (lo + hi)}; }
};

// Error categories. The CLI maps ConfigError to exit code 2 and the rest to 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lpm
