#include "perclab/norm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "perclab/errors.hpp"

namespace perclab {

namespace {

constexpr double kSameDirection = 1e-12;

std::vector<NormSample> prepare(int d, std::vector<NormSample> samples, bool symmetric) {
    std::vector<NormSample> out;
    auto find = [&](const Eigen::VectorXd& u) {
        return std::find_if(out.begin(), out.end(),
                            [&](const NormSample& s) { return (s.direction - u).norm() < kSameDirection; });
    };
    auto insert = [&](const Eigen::VectorXd& u, double value) {
        const auto it = find(u);
        if (it == out.end()) {
            out.push_back({u, value});
        } else if (std::abs(it->value - value) > 1e-12 * std::max(it->value, value)) {
            throw DomainError("conflicting norm values for the same direction");
        }
    };
    for (auto& s : samples) {
        if (s.direction.size() != d) throw DomainError("norm sample has the wrong dimension");
        const double len = s.direction.norm();
        if (!(len > 0.0)) throw DomainError("norm sample direction is zero");
        // homogeneity: tau(v / |v|) = tau(v) / |v|
        const double value = s.value / len;
        if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("norm values must be positive");
        const Eigen::VectorXd u = s.direction / len;
        insert(u, value);
        if (symmetric) insert(-u, value);
    }
    return out;
}

Polytope body_of(int d, const std::vector<NormSample>& samples) {
    std::vector<Halfspace> hs;
    hs.reserve(samples.size());
    for (const auto& s : samples) hs.push_back({s.direction, s.value});
    return Polytope::from_halfspaces(d, std::move(hs));
}

}  // namespace

NormTable::NormTable(int dimension, std::vector<NormSample> samples, bool symmetric)
    : dim_(dimension), symmetric_(symmetric), samples_(prepare(dimension, std::move(samples), symmetric)),
      body_(body_of(dimension, samples_)) {}

NormTable NormTable::from_function(int dimension, const std::function<double(const Eigen::VectorXd&)>& f,
                                   const std::vector<Eigen::VectorXd>& directions, bool symmetric) {
    std::vector<NormSample> samples;
    samples.reserve(directions.size());
    for (const auto& u : directions) samples.push_back({u.normalized(), f(u.normalized())});
    return NormTable(dimension, std::move(samples), symmetric);
}

double NormTable::operator()(const Eigen::VectorXd& v) const {
    const double len = v.norm();
    if (len == 0.0) return 0.0;
    const Eigen::VectorXd u = v / len;
    for (const auto& s : samples_) {
        if ((s.direction - u).norm() < kSameDirection) return len * s.value;
    }
    return len * body_.support(u);
}

double NormTable::max_value() const {
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, s.value);
    return m;
}

NormTable NormTable::scaled(double t) const {
    if (!(t > 0.0)) throw DomainError("norm scale must be positive");
    std::vector<NormSample> s = samples_;
    for (auto& x : s) x.value *= t;
    return NormTable(dim_, std::move(s), symmetric_);
}

NormTable read_norm_table(std::istream& in, int dimension, bool symmetric) {
    std::vector<NormSample> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> xs;
        double x;
        while (fields >> x) xs.push_back(x);
        if (!fields.eof()) throw ConfigError("norm table line " + std::to_string(lineno) + ": not a number");
        if (xs.empty()) continue;
        if (static_cast<int>(xs.size()) != dimension + 1) {
            throw ConfigError("norm table line " + std::to_string(lineno) + ": expected " +
                              std::to_string(dimension + 1) + " numbers");
        }
        NormSample s;
        s.direction = Eigen::Map<Eigen::VectorXd>(xs.data(), dimension);
        s.value = xs.back();
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw ConfigError("norm table is empty");
    return NormTable(dimension, std::move(samples), symmetric);
}

void write_norm_table(std::ostream& out, const NormTable& norm) {
    out << std::setprecision(17);
    for (const auto& s : norm.samples()) {
        for (int a = 0; a < norm.dimension(); ++a) out << s.direction(a) << ' ';
        out << s.value << '\n';
    }
}

NormTable named_norm(const std::string& name, int dimension, int direction_count) {
    std::function<double(const Eigen::VectorXd&)> f;
    if (name == "l1") {
        f = [](const Eigen::VectorXd& v) { return v.lpNorm<1>(); };
    } else if (name == "linf") {
        f = [](const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); };
    } else if (name == "l2") {
        f = [](const Eigen::VectorXd& v) { return v.norm(); };
    } else if (name == "elliptic") {
        f = [](const Eigen::VectorXd& v) {
            Eigen::VectorXd w = v;
            w(0) *= 2.0;
            return w.norm();
        };
    } else {
        throw ConfigError("unknown norm '" + name + "' (expected l1, linf, l2 or elliptic)");
    }
    auto dirs = quasi_uniform_directions(dimension, direction_count);
    for (const auto& e : axis_directions(dimension)) dirs.push_back(e);
    return NormTable::from_function(dimension, f, dirs, true);
}

}  // namespace perclab
