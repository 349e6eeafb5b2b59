#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace perclab {

class Rng;

// {x : normal . x <= offset}, normal of unit length.
struct Halfspace {
    Eigen::VectorXd normal;
    double offset = 0.0;
};

struct Facet {
    Eigen::VectorXd normal;
    double offset = 0.0;
    double measure = 0.0;               // (d-1)-dimensional
    Eigen::VectorXd centroid;
    std::vector<Eigen::VectorXd> vertices;  // d=3: counter-clockwise seen from outside
};

// Bounded convex polytope in dimension 2 or 3, built from half-spaces.
// Redundant half-spaces are kept in halfspaces() but produce no facet.
class Polytope {
public:
    static Polytope from_halfspaces(int dimension, std::vector<Halfspace> halfspaces);

    int dimension() const { return dim_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
    const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }

    // (1/d) sum over facets of offset * measure.
    double cone_volume() const;
    // Sum of signed simplices spanned by the origin and a triangulated boundary.
    double simplex_volume() const;
    double surface_area() const;
    double support(const Eigen::VectorXd& v) const;
    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

    Polytope dilated(double lambda) const;

private:
    int dim_ = 0;
    std::vector<Halfspace> halfspaces_;
    std::vector<Eigen::VectorXd> vertices_;
    std::vector<Facet> facets_;
};

// Lebesgue volume; throws GeometryError when the two volume routes disagree
// beyond 1e-9 relative.
double volume(const Polytope& poly);
Polytope dilate_to_volume(const Polytope& poly, double target_volume);

// Quasi-uniform unit directions: equally spaced angles (d=2, starting on e_1)
// or a Fibonacci lattice on the sphere (d=3).
std::vector<Eigen::VectorXd> quasi_uniform_directions(int dimension, int count);
std::vector<Eigen::VectorXd> axis_directions(int dimension);

Polytope cube(int dimension, double half_side = 1.0);
// Circumscribed polygon / polyhedron: all facet offsets equal to `radius`.
Polytope ball_approximation(int dimension, int directions, double radius = 1.0);
// Intersection of `pairs` random slabs |u . x| <= b plus axis slabs.
Polytope random_symmetric_polytope(int dimension, int pairs, Rng& rng);

}  // namespace perclab
