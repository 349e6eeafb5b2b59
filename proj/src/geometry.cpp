#include "perclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "perclab/errors.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Line2 {
    Vector2d normal;
    double offset;
};

// Intersection of `lines[i]` with every other half-plane, as a segment
// [lo, hi] along the line direction. Returns false when empty or degenerate.
bool clip_line(const std::vector<Line2>& lines, std::size_t i, double tol, Vector2d& a, Vector2d& b) {
    const Vector2d n = lines[i].normal;
    const Vector2d p = n * lines[i].offset;
    const Vector2d t(-n.y(), n.x());
    double lo = -kInf, hi = kInf;
    for (std::size_t j = 0; j < lines.size(); ++j) {
        if (j == i) continue;
        const double slope = lines[j].normal.dot(t);
        const double room = lines[j].offset - lines[j].normal.dot(p);
        if (std::abs(slope) < 1e-14) {
            // parallel: either the whole line or nothing
            if (room < -tol) return false;
            continue;
        }
        const double bound = room / slope;
        if (slope > 0) {
            hi = std::min(hi, bound);
        } else {
            lo = std::max(lo, bound);
        }
        if (lo > hi - tol && std::isfinite(lo) && std::isfinite(hi)) return false;
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw GeometryError("half-space intersection is unbounded");
    }
    a = p + lo * t;
    b = p + hi * t;
    return true;
}

// Convex polygon through the given boundary points, counter-clockwise.
std::vector<Vector2d> order_ccw(std::vector<Vector2d> pts, double tol) {
    std::vector<Vector2d> uniq;
    for (const auto& q : pts) {
        const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const Vector2d& u) { return (u - q).norm() <= tol; });
        if (!dup) uniq.push_back(q);
    }
    if (uniq.empty()) return uniq;
    Vector2d c = Vector2d::Zero();
    for (const auto& q : uniq) c += q;
    c /= static_cast<double>(uniq.size());
    std::sort(uniq.begin(), uniq.end(), [&](const Vector2d& u, const Vector2d& v) {
        return std::atan2(u.y() - c.y(), u.x() - c.x()) < std::atan2(v.y() - c.y(), v.x() - c.x());
    });
    return uniq;
}

double shoelace(const std::vector<Vector2d>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& u = poly[i];
        const auto& v = poly[(i + 1) % poly.size()];
        s += u.x() * v.y() - u.y() * v.x();
    }
    return 0.5 * s;
}

void add_vertex(std::vector<VectorXd>& vs, const VectorXd& q, double tol) {
    for (const auto& u : vs) {
        if ((u - q).norm() <= tol) return;
    }
    vs.push_back(q);
}

std::vector<Halfspace> normalised(int d, std::vector<Halfspace> hs, double& scale) {
    std::vector<Halfspace> out;
    scale = 0.0;
    for (auto& h : hs) {
        if (h.normal.size() != d) throw GeometryError("half-space normal has the wrong dimension");
        const double len = h.normal.norm();
        if (!(len > 0.0) || !std::isfinite(h.offset)) throw GeometryError("degenerate half-space");
        h.normal /= len;
        h.offset /= len;
        // merge repeated normals, keeping the tighter offset
        auto same = std::find_if(out.begin(), out.end(), [&](const Halfspace& o) {
            return (o.normal - h.normal).norm() < 1e-12;
        });
        if (same != out.end()) {
            same->offset = std::min(same->offset, h.offset);
        } else {
            out.push_back(h);
        }
        scale = std::max(scale, std::abs(h.offset));
    }
    if (scale == 0.0) scale = 1.0;
    return out;
}

}  // namespace

Polytope Polytope::from_halfspaces(int dimension, std::vector<Halfspace> halfspaces) {
    if (dimension != 2 && dimension != 3) throw GeometryError("geometry kernel supports d = 2 or 3");
    Polytope poly;
    poly.dim_ = dimension;
    double scale = 1.0;
    poly.halfspaces_ = normalised(dimension, std::move(halfspaces), scale);
    const auto& hs = poly.halfspaces_;
    if (static_cast<int>(hs.size()) < dimension + 1) {
        throw GeometryError("too few half-spaces for a bounded polytope");
    }
    const double tol = 1e-12 * scale;

    if (dimension == 2) {
        std::vector<Line2> lines;
        for (const auto& h : hs) lines.push_back({Vector2d(h.normal(0), h.normal(1)), h.offset});
        for (std::size_t i = 0; i < lines.size(); ++i) {
            Vector2d a, b;
            if (!clip_line(lines, i, tol, a, b)) continue;
            const double len = (b - a).norm();
            if (len <= tol) continue;
            Facet f;
            f.normal = hs[i].normal;
            f.offset = hs[i].offset;
            f.measure = len;
            f.centroid = (0.5 * (a + b)).eval();
            f.vertices = {VectorXd(a), VectorXd(b)};
            add_vertex(poly.vertices_, a, tol);
            add_vertex(poly.vertices_, b, tol);
            poly.facets_.push_back(std::move(f));
        }
    } else {
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const Vector3d n = hs[i].normal;
            const Vector3d p = n * hs[i].offset;
            // orthonormal frame (u, w) with u x w = n
            const Vector3d helper = std::abs(n.x()) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitY();
            const Vector3d u = n.cross(helper).normalized();
            const Vector3d w = n.cross(u);
            std::vector<Line2> lines;
            bool empty = false;
            for (std::size_t j = 0; j < hs.size() && !empty; ++j) {
                if (j == i) continue;
                const Vector3d m = hs[j].normal;
                const Vector2d a(m.dot(u), m.dot(w));
                const double room = hs[j].offset - m.dot(p);
                if (a.norm() < 1e-12) {
                    if (room < -tol) empty = true;
                    continue;
                }
                lines.push_back({a / a.norm(), room / a.norm()});
            }
            if (empty || lines.size() < 3) {
                if (!empty) throw GeometryError("half-space intersection is unbounded");
                continue;
            }
            std::vector<Vector2d> pts;
            for (std::size_t j = 0; j < lines.size(); ++j) {
                Vector2d a, b;
                if (!clip_line(lines, j, tol, a, b)) continue;
                if ((b - a).norm() <= tol) continue;
                pts.push_back(a);
                pts.push_back(b);
            }
            const auto polygon = order_ccw(std::move(pts), tol);
            if (polygon.size() < 3) continue;
            const double area = shoelace(polygon);
            if (area <= tol * scale) continue;
            Vector2d c2 = Vector2d::Zero();
            // area-weighted centroid over the fan from polygon[0]
            for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
                const double tri = 0.5 * ((polygon[k] - polygon[0]).x() * (polygon[k + 1] - polygon[0]).y() -
                                          (polygon[k] - polygon[0]).y() * (polygon[k + 1] - polygon[0]).x());
                c2 += tri * (polygon[0] + polygon[k] + polygon[k + 1]) / 3.0;
            }
            c2 /= area;
            Facet f;
            f.normal = hs[i].normal;
            f.offset = hs[i].offset;
            f.measure = area;
            f.centroid = (p + c2.x() * u + c2.y() * w).eval();
            for (const auto& q : polygon) {
                const Vector3d x = p + q.x() * u + q.y() * w;
                f.vertices.emplace_back(x);
                add_vertex(poly.vertices_, x, tol);
            }
            poly.facets_.push_back(std::move(f));
        }
    }
    if (static_cast<int>(poly.facets_.size()) < dimension + 1) {
        throw GeometryError("half-space intersection is empty or degenerate");
    }
    return poly;
}

double Polytope::cone_volume() const {
    double v = 0.0;
    for (const auto& f : facets_) v += f.offset * f.measure;
    return v / dim_;
}

double Polytope::simplex_volume() const {
    if (dim_ == 2) {
        std::vector<Vector2d> pts;
        for (const auto& x : vertices_) pts.emplace_back(x(0), x(1));
        return shoelace(order_ccw(std::move(pts), 0.0));
    }
    double v = 0.0;
    for (const auto& f : facets_) {
        const Vector3d a = f.vertices[0];
        for (std::size_t k = 1; k + 1 < f.vertices.size(); ++k) {
            const Vector3d b = f.vertices[k];
            const Vector3d c = f.vertices[k + 1];
            v += a.dot(b.cross(c)) / 6.0;
        }
    }
    return v;
}

double Polytope::surface_area() const {
    double s = 0.0;
    for (const auto& f : facets_) s += f.measure;
    return s;
}

double Polytope::support(const VectorXd& v) const {
    double best = -kInf;
    for (const auto& x : vertices_) best = std::max(best, x.dot(v));
    return best;
}

bool Polytope::contains(const VectorXd& x, double tol) const {
    return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                       [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset + tol; });
}

Polytope Polytope::dilated(double lambda) const {
    if (!(lambda > 0.0)) throw DomainError("dilation factor must be positive");
    Polytope out = *this;
    for (auto& h : out.halfspaces_) h.offset *= lambda;
    for (auto& x : out.vertices_) x *= lambda;
    const double area_scale = std::pow(lambda, dim_ - 1);
    for (auto& f : out.facets_) {
        f.offset *= lambda;
        f.measure *= area_scale;
        f.centroid *= lambda;
        for (auto& x : f.vertices) x *= lambda;
    }
    return out;
}

double volume(const Polytope& poly) {
    const double a = poly.cone_volume();
    const double b = poly.simplex_volume();
    if (!(a > 0.0) || std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b))) {
        throw GeometryError("inconsistent polytope: facet volume " + std::to_string(a) +
                            " vs simplex volume " + std::to_string(b));
    }
    return a;
}

Polytope dilate_to_volume(const Polytope& poly, double target_volume) {
    if (!(target_volume > 0.0)) throw DomainError("target volume must be positive");
    const double v = volume(poly);
    return poly.dilated(std::pow(target_volume / v, 1.0 / poly.dimension()));
}

std::vector<VectorXd> quasi_uniform_directions(int dimension, int count) {
    if (count < 1) throw DomainError("direction count must be positive");
    std::vector<VectorXd> out;
    if (dimension == 2) {
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * std::numbers::pi * k / count;
            out.push_back(Vector2d(std::cos(a), std::sin(a)));
        }
    } else if (dimension == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - (2.0 * k + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            out.push_back(Vector3d(r * std::cos(golden * k), r * std::sin(golden * k), z));
        }
    } else {
        throw GeometryError("geometry kernel supports d = 2 or 3");
    }
    return out;
}

std::vector<VectorXd> axis_directions(int dimension) {
    std::vector<VectorXd> out;
    for (int a = 0; a < dimension; ++a) {
        for (double s : {1.0, -1.0}) {
            VectorXd e = VectorXd::Zero(dimension);
            e(a) = s;
            out.push_back(e);
        }
    }
    return out;
}

Polytope cube(int dimension, double half_side) {
    std::vector<Halfspace> hs;
    for (const auto& e : axis_directions(dimension)) hs.push_back({e, half_side});
    return Polytope::from_halfspaces(dimension, std::move(hs));
}

Polytope ball_approximation(int dimension, int directions, double radius) {
    std::vector<Halfspace> hs;
    for (const auto& u : quasi_uniform_directions(dimension, directions)) hs.push_back({u, radius});
    return Polytope::from_halfspaces(dimension, std::move(hs));
}

Polytope random_symmetric_polytope(int dimension, int pairs, Rng& rng) {
    std::vector<Halfspace> hs;
    auto offset = [&] { return 0.5 + rng.uniform(); };
    for (const auto& e : axis_directions(dimension)) {
        if (e.sum() < 0) continue;
        const double b = offset();
        hs.push_back({e, b});
        hs.push_back({-e, b});
    }
    for (int i = 0; i < pairs; ++i) {
        VectorXd u(dimension);
        // Box-Muller normals give an isotropic direction.
        for (int a = 0; a < dimension; ++a) {
            const double r = std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
            u(a) = r * std::cos(2.0 * std::numbers::pi * rng.uniform());
        }
        u.normalize();
        const double b = offset();
        hs.push_back({u, b});
        hs.push_back({-u, b});
    }
    return Polytope::from_halfspaces(dimension, std::move(hs));
}

}  // namespace perclab
