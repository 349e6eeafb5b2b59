#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "perclab/geometry.hpp"

namespace perclab {

struct NormSample {
    Eigen::VectorXd direction;  // unit length
    double value = 0.0;         // > 0
};

// A norm known on finitely many unit directions. Off the samples it is the
// support function of K = ∩ {x : x . u <= value(u)}, i.e. the largest convex
// positively homogeneous function not exceeding the samples.
class NormTable {
public:
    NormTable(int dimension, std::vector<NormSample> samples, bool symmetric = true);

    static NormTable from_function(int dimension, const std::function<double(const Eigen::VectorXd&)>& f,
                                   const std::vector<Eigen::VectorXd>& directions, bool symmetric = true);

    int dimension() const { return dim_; }
    bool symmetric() const { return symmetric_; }
    const std::vector<NormSample>& samples() const { return samples_; }
    const Polytope& sample_body() const { return body_; }

    // Positively homogeneous: evaluates |v| * value(v / |v|).
    double operator()(const Eigen::VectorXd& v) const;
    double max_value() const;

    NormTable scaled(double t) const;

private:
    int dim_;
    bool symmetric_;
    std::vector<NormSample> samples_;
    Polytope body_;
};

// Text format: one sample per line, "v_1 ... v_d value". '#' starts a comment.
NormTable read_norm_table(std::istream& in, int dimension, bool symmetric = true);
void write_norm_table(std::ostream& out, const NormTable& norm);

// "l1", "linf", "l2" (constant on unit vectors) or "elliptic" (axis weights
// 2, 1, 1, ...), sampled on quasi-uniform directions plus the axes.
NormTable named_norm(const std::string& name, int dimension, int direction_count);

}  // namespace perclab
