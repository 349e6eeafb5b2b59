#include "perclab/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "perclab/errors.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

// Per-vertex arrays are allocated, so keep well inside 32-bit land.
constexpr std::int64_t kMaxVertices = std::int64_t{1} << 28;

constexpr char kMagic[8] = {'P', 'R', 'C', 'L', 'B', 'O', 'N', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(p));
    }
}

std::size_t word_count(std::int64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    std::uint64_t raw = 0;
    std::memcpy(&raw, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(raw >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
        throw ConfigError("bond config: truncated header");
    }
    std::uint64_t raw = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) raw |= std::uint64_t{buf[i]} << (8 * i);
    T value;
    std::memcpy(&value, &raw, sizeof(T));
    return value;
}

}  // namespace

BoxLattice::BoxLattice(int dimension, int radius) : dim_(dimension), radius_(radius) {
    if (dimension < 2 || dimension > kMaxDimension) {
        throw DomainError("dimension must lie in [2, " + std::to_string(kMaxDimension) + "]");
    }
    if (radius < 1) throw DomainError("radius must be >= 1");

    const std::int64_t s = 2 * std::int64_t{radius} + 1;
    std::int64_t count = 1;
    for (int i = 0; i < dim_; ++i) {
        if (count > kMaxVertices / s) {
            throw SizeError("box of radius " + std::to_string(radius) + " in dimension " +
                            std::to_string(dimension) + " is too large");
        }
        count *= s;
    }
    vertex_count_ = count;
    stride_[dim_ - 1] = 1;
    for (int a = dim_ - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * s;

    mask_.resize(static_cast<std::size_t>(vertex_count_));
    edge_offset_.resize(static_cast<std::size_t>(vertex_count_) + 1);
    Point x{};
    for (int a = 0; a < dim_; ++a) x[a] = -radius_;
    EdgeIndex offset = 0;
    for (VertexId v = 0; v < vertex_count_; ++v) {
        std::uint16_t m = 0;
        for (int a = 0; a < dim_; ++a) {
            if (x[a] < radius_) m |= static_cast<std::uint16_t>(1U << a);
            if (x[a] > -radius_) m |= static_cast<std::uint16_t>(1U << (dim_ + a));
        }
        mask_[v] = m;
        edge_offset_[v] = offset;
        offset += std::popcount(static_cast<unsigned>(m & ((1U << dim_) - 1U)));
        // odometer, last axis fastest
        for (int a = dim_ - 1; a >= 0; --a) {
            if (++x[a] <= radius_) break;
            x[a] = -radius_;
        }
    }
    edge_offset_[vertex_count_] = offset;
    Point zero{};
    origin_ = rank(zero);
}

bool BoxLattice::contains(const Point& x) const {
    for (int a = 0; a < dim_; ++a) {
        if (x[a] < -radius_ || x[a] > radius_) return false;
    }
    return true;
}

VertexId BoxLattice::rank(const Point& x) const {
    if (!contains(x)) throw DomainError("point outside the box");
    VertexId v = 0;
    for (int a = 0; a < dim_; ++a) v += (x[a] + radius_) * stride_[a];
    return v;
}

Point BoxLattice::coords(VertexId v) const {
    Point x{};
    for (int a = 0; a < dim_; ++a) x[a] = coord(v, a);
    return x;
}

bool BoxLattice::on_boundary(VertexId v) const {
    const unsigned full = (1U << (2 * dim_)) - 1U;
    return mask_[v] != full;
}

bool BoxLattice::within(VertexId v, int r) const { return sup_norm(v) <= r; }

int BoxLattice::sup_norm(VertexId v) const {
    int m = 0;
    for (int a = 0; a < dim_; ++a) m = std::max(m, std::abs(coord(v, a)));
    return m;
}

int BoxLattice::degree(VertexId v) const { return std::popcount(static_cast<unsigned>(mask_[v])); }

EdgeIndex BoxLattice::edge_index(const Edge& e) const {
    if (e.lower < 0 || e.lower >= vertex_count_ || e.axis < 0 || e.axis >= dim_ ||
        !((mask_[e.lower] >> e.axis) & 1U)) {
        throw DomainError("no such edge in the box");
    }
    return edge_index_unchecked(e.lower, e.axis);
}

Edge BoxLattice::edge(EdgeIndex i) const {
    if (i < 0 || i >= edge_count()) throw DomainError("edge index out of range");
    const auto it = std::upper_bound(edge_offset_.begin(), edge_offset_.end(), i);
    const VertexId v = static_cast<VertexId>(it - edge_offset_.begin()) - 1;
    std::int64_t j = i - edge_offset_[v];
    for (int a = 0; a < dim_; ++a) {
        if ((mask_[v] >> a) & 1U) {
            if (j == 0) return Edge{v, a};
            --j;
        }
    }
    throw StateError("corrupt edge offset table");
}

std::pair<VertexId, VertexId> BoxLattice::endpoints(EdgeIndex i) const {
    const Edge e = edge(i);
    return {e.lower, e.lower + stride_[e.axis]};
}

std::shared_ptr<const BoxLattice> build_box(int dimension, int radius) {
    return std::make_shared<const BoxLattice>(dimension, radius);
}

BondConfig::BondConfig(std::shared_ptr<const BoxLattice> lattice, double p, std::uint64_t master_seed,
                       std::vector<std::uint64_t> open_words,
                       std::optional<std::vector<double>> uniforms)
    : lattice_(std::move(lattice)), p_(p), seed_(master_seed), words_(std::move(open_words)),
      uniforms_(std::move(uniforms)) {
    check_probability(p_);
    const std::int64_t e = lattice_->edge_count();
    if (words_.size() != word_count(e)) throw StateError("open bit count does not match edge count");
    if (e % 64 != 0 && (words_.back() >> (e % 64)) != 0) {
        throw StateError("padding bits past the last edge must be zero");
    }
    if (uniforms_ && static_cast<std::int64_t>(uniforms_->size()) != e) {
        throw StateError("uniform count does not match edge count");
    }
}

int BondConfig::open_degree(VertexId v) const {
    int k = 0;
    for (int a = 0; a < lattice_->dimension(); ++a) {
        k += is_open(v, a, +1);
        k += is_open(v, a, -1);
    }
    return k;
}

std::int64_t BondConfig::open_edge_count() const {
    std::int64_t k = 0;
    for (std::uint64_t w : words_) k += std::popcount(w);
    return k;
}

std::span<const double> BondConfig::uniforms() const {
    if (!uniforms_) throw StateError("configuration does not retain uniforms");
    return *uniforms_;
}

double edge_uniform(std::uint64_t master_seed, const Point& x, int dimension, int axis) {
    std::uint64_t h = splitmix64(master_seed);
    for (int a = 0; a < dimension; ++a) {
        h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(x[a])));
    }
    return to_unit_double(hash_combine(h, static_cast<std::uint64_t>(axis)));
}

BondConfig sample_config(std::shared_ptr<const BoxLattice> lattice, double p, std::uint64_t seed,
                         bool retain_uniforms) {
    check_probability(p);
    const BoxLattice& box = *lattice;
    const int d = box.dimension();
    std::vector<std::uint64_t> words(word_count(box.edge_count()), 0);
    std::optional<std::vector<double>> uniforms;
    if (retain_uniforms) uniforms.emplace(static_cast<std::size_t>(box.edge_count()));

    Point x{};
    for (int a = 0; a < d; ++a) x[a] = -box.radius();
    EdgeIndex e = 0;
    for (VertexId v = 0; v < box.vertex_count(); ++v) {
        for (int a = 0; a < d; ++a) {
            if (x[a] == box.radius()) continue;
            const double u = edge_uniform(seed, x, d, a);
            if (u < p) words[e >> 6] |= std::uint64_t{1} << (e & 63);
            if (uniforms) (*uniforms)[e] = u;
            ++e;
        }
        for (int a = d - 1; a >= 0; --a) {
            if (++x[a] <= box.radius()) break;
            x[a] = -box.radius();
        }
    }
    return BondConfig(std::move(lattice), p, seed, std::move(words), std::move(uniforms));
}

BondConfig monotone_couple(const BondConfig& config, double p2) {
    check_probability(p2);
    const auto u = config.uniforms();
    std::vector<std::uint64_t> words(config.words().size(), 0);
    for (std::size_t e = 0; e < u.size(); ++e) {
        if (u[e] < p2) words[e >> 6] |= std::uint64_t{1} << (e & 63);
    }
    return BondConfig(config.lattice_ptr(), p2, config.master_seed(), std::move(words),
                      std::vector<double>(u.begin(), u.end()));
}

void write_config(std::ostream& out, const BondConfig& config) {
    out.write(kMagic, sizeof kMagic);
    put_le<std::uint32_t>(out, kFormatVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config.lattice().dimension()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config.lattice().radius()));
    put_le<double>(out, config.p());
    put_le<std::uint64_t>(out, config.master_seed());
    const std::int64_t bytes = (config.lattice().edge_count() + 7) / 8;
    const auto words = config.words();
    for (std::int64_t b = 0; b < bytes; ++b) {
        const char c = static_cast<char>((words[b / 8] >> (8 * (b % 8))) & 0xFFU);
        out.put(c);
    }
    if (!out) throw ConfigError("bond config: write failed");
}

BondConfig read_config(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw ConfigError("bond config: bad magic");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != kFormatVersion) throw ConfigError("bond config: unsupported version");
    const auto d = get_le<std::uint32_t>(in);
    const auto r = get_le<std::uint32_t>(in);
    const auto p = get_le<double>(in);
    const auto seed = get_le<std::uint64_t>(in);
    if (d < 2 || d > kMaxDimension || r < 1 || r > (1U << 20)) {
        throw ConfigError("bond config: invalid dimension or radius");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("bond config: invalid probability");
    auto lattice = build_box(static_cast<int>(d), static_cast<int>(r));
    const std::int64_t e = lattice->edge_count();
    const std::int64_t bytes = (e + 7) / 8;
    std::vector<std::uint64_t> words(word_count(e), 0);
    for (std::int64_t b = 0; b < bytes; ++b) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw ConfigError("bond config: bit payload too short");
        words[b / 8] |= static_cast<std::uint64_t>(c & 0xFF) << (8 * (b % 8));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ConfigError("bond config: trailing bytes");
    if (e % 64 != 0 && (words.back() >> (e % 64)) != 0) {
        throw ConfigError("bond config: nonzero padding bits");
    }
    return BondConfig(std::move(lattice), p, seed, std::move(words));
}

void save_config(const std::filesystem::path& path, const BondConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    write_config(out, config);
}

BondConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return read_config(in);
}

}  // namespace perclab
