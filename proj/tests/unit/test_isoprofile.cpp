#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "fixtures.hpp"
#include "perclab/cluster.hpp"
#include "perclab/errors.hpp"
#include "perclab/exploration.hpp"
#include "perclab/isoprofile.hpp"

using namespace perclab;
using fixtures::at;

namespace {

struct Oracle {
    Ratio value;
    std::vector<VertexId> witness;
};

// Every subset of the cluster as a bitmask; keeps connected ones containing
// the origin. Only for clusters of at most ~18 vertices.
Oracle subset_oracle(const BondConfig& c, VertexId origin, std::int64_t cap) {
    const auto cl = open_cluster(c, origin);
    const auto& vs = cl.vertices;
    const int m = static_cast<int>(vs.size());
    const int root = static_cast<int>(std::lower_bound(vs.begin(), vs.end(), origin) - vs.begin());
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int a = 0; a < c.lattice().dimension(); ++a) {
                for (int dir : {-1, 1}) {
                    if (c.is_open(vs[i], a, dir) && c.lattice().neighbor(vs[i], a, dir) == vs[j]) adj[i] |= 1U << j;
                }
            }
        }
    }
    Oracle best{Ratio(1000, 1), {}};
    for (std::uint32_t mask = 1; mask < (1U << m); ++mask) {
        if (!((mask >> root) & 1U) || std::popcount(mask) > cap) continue;
        std::uint32_t reach = 1U << root, frontier = reach;
        while (frontier) {
            std::uint32_t next = 0;
            for (int i = 0; i < m; ++i) {
                if ((frontier >> i) & 1U) next |= adj[i];
            }
            next &= mask & ~reach;
            reach |= next;
            frontier = next;
        }
        if (reach != mask) continue;
        std::vector<VertexId> h;
        for (int i = 0; i < m; ++i) {
            if ((mask >> i) & 1U) h.push_back(vs[i]);
        }
        const Ratio r(open_edge_boundary_size(c, h), static_cast<std::int64_t>(h.size()));
        if (r < best.value || (r == best.value && h < best.witness)) best = {r, h};
    }
    return best;
}

bool connected_in_open_graph(const BondConfig& c, const std::vector<VertexId>& h) {
    if (h.empty()) return false;
    const std::set<VertexId> s(h.begin(), h.end());
    std::set<VertexId> seen{h.front()};
    std::vector<VertexId> stack{h.front()};
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        for (int a = 0; a < c.lattice().dimension(); ++a) {
            for (int dir : {-1, 1}) {
                if (!c.is_open(v, a, dir)) continue;
                const VertexId w = c.lattice().neighbor(v, a, dir);
                if (s.count(w) && seen.insert(w).second) stack.push_back(w);
            }
        }
    }
    return seen.size() == s.size();
}

void expect_valid_witness(const BondConfig& c, VertexId origin, const ProfileResult& r) {
    ASSERT_FALSE(r.witness.empty());
    EXPECT_TRUE(std::is_sorted(r.witness.begin(), r.witness.end()));
    EXPECT_TRUE(std::binary_search(r.witness.begin(), r.witness.end(), origin));
    EXPECT_LE(static_cast<std::int64_t>(r.witness.size()), r.cap);
    EXPECT_TRUE(connected_in_open_graph(c, r.witness));
    EXPECT_EQ(r.value, Ratio(open_edge_boundary_size(c, r.witness), static_cast<std::int64_t>(r.witness.size())));
}

}  // namespace

TEST(Ratio, ArithmeticAndParsing) {
    EXPECT_EQ(Ratio(6, 4), Ratio(3, 2));
    EXPECT_EQ(Ratio(0, 7), Ratio(0, 1));
    EXPECT_EQ(Ratio(4, 3).times(3).str(), "4/1");
    EXPECT_LT(Ratio(1, 3), Ratio(34, 100));
    EXPECT_EQ(Ratio::parse("12/9"), Ratio(4, 3));
    EXPECT_THROW(Ratio(1, 0), DomainError);
    EXPECT_THROW(Ratio(-1, 2), DomainError);
    EXPECT_THROW(Ratio::parse("3/"), ConfigError);
    EXPECT_THROW(Ratio::parse("x"), ConfigError);
}

TEST(Bruteforce, ClosedConfigGivesZero) {
    auto box = build_box(2, 3);
    const auto r = profile_bruteforce(sample_config(box, 0.0, 1), box->origin(), 1);
    EXPECT_TRUE(r.value.is_zero());
    EXPECT_EQ(r.witness, std::vector<VertexId>{box->origin()});
    EXPECT_EQ(r.zero_reason, ZeroReason::cluster_fits_cap);
    EXPECT_EQ(r.mode, SolverMode::exact);
}

TEST(Bruteforce, SmallExample) {
    const auto c = fixtures::small_example();
    const BoxLattice& box = c.lattice();
    const VertexId o = box.origin();

    const auto two = profile_bruteforce(c, o, 2);
    EXPECT_EQ(two.value, Ratio(1, 2));
    EXPECT_EQ(two.witness, (std::vector<VertexId>{at(box, {0, 0}), at(box, {0, 1})}));

    const auto three = profile_bruteforce(c, o, 3);
    EXPECT_EQ(three.value, Ratio(1, 3));
    EXPECT_EQ(three.witness, (std::vector<VertexId>{at(box, {0, 0}), at(box, {0, 1}), at(box, {1, 0})}));

    EXPECT_EQ(profile_bruteforce(c, o, 1).value, Ratio(2, 1));
    const auto four = profile_bruteforce(c, o, 4);
    EXPECT_TRUE(four.value.is_zero());
    EXPECT_EQ(four.witness.size(), 4u);
    EXPECT_THROW(profile_bruteforce(c, o, 0), DomainError);
}

TEST(Bruteforce, MatchesSubsetOracle) {
    int checked = 0;
    for (int s = 0; s < 400 && checked < 120; ++s) {
        auto box = build_box(2, 2);
        const auto c = sample_config(box, 0.45 + 0.1 * (s % 3), 10 + s);
        const auto cl = open_cluster(c, box->origin());
        if (cl.size() > 16 || cl.size() < 3) continue;
        ++checked;
        for (std::int64_t cap = 1; cap <= static_cast<std::int64_t>(cl.size()); ++cap) {
            const auto r = profile_bruteforce(c, box->origin(), cap);
            const auto o = subset_oracle(c, box->origin(), cap);
            EXPECT_EQ(r.value, o.value) << "seed " << s << " cap " << cap;
            EXPECT_EQ(r.witness, o.witness) << "seed " << s << " cap " << cap;
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(Bruteforce, NonIncreasingInCap) {
    for (int s = 0; s < 40; ++s) {
        auto box = build_box(2, 3);
        const auto c = sample_config(box, 0.6, 200 + s);
        Ratio prev(1000, 1);
        for (std::int64_t cap = 1; cap <= 10; ++cap) {
            const auto r = profile_bruteforce(c, box->origin(), cap);
            EXPECT_LE(r.value, prev);
            prev = r.value;
        }
    }
}

TEST(Bruteforce, RefusesOverBudget) {
    auto box = build_box(2, 6);
    const auto c = sample_config(box, 1.0, 1);
    EXPECT_THROW(profile_bruteforce(c, box->origin(), 13), BudgetError);
    EXPECT_NO_THROW(profile_bruteforce(c, box->origin(), 200));  // cluster fits
}

TEST(Anneal, EqualsBruteforceOnSmallInstances) {
    for (int s = 0; s < 100; ++s) {
        auto box = build_box(2, 2);
        const auto c = sample_config(box, 0.5 + 0.1 * (s % 4), 5000 + s);
        const std::int64_t cap = 1 + s % 8;
        const auto exact = profile_bruteforce(c, box->origin(), cap, {25, 25});
        const auto heur = profile_anneal(c, box->origin(), cap, {}, 16, s);
        // ties may resolve to another minimizer; only the value is canonical
        EXPECT_EQ(heur.value, exact.value) << "seed " << s;
        EXPECT_EQ(heur.mode, SolverMode::upper_bound);
        expect_valid_witness(c, box->origin(), heur);
    }
}

TEST(Anneal, WitnessIsValidUpperBound) {
    for (int s = 0; s < 20; ++s) {
        auto box = build_box(2, 16);
        const auto c = sample_config(box, 0.65, 70 + s);
        const VertexId o = box->origin();
        if (open_cluster(c, o).size() <= 64) continue;
        const auto r = profile_anneal(c, o, 64, {}, 4, s);
        expect_valid_witness(c, o, r);
        // any connected set containing the origin bounds the minimum from above
        const auto h = explore_until_halt(c, o, std::nullopt, 2, true);
        const auto ball = h.terminal;
        if (static_cast<std::int64_t>(ball.size()) <= 64) {
            EXPECT_LE(r.value, Ratio(open_edge_boundary_size(c, ball), static_cast<std::int64_t>(ball.size())));
        }
    }
}

TEST(Anneal, DeterministicForSeed) {
    auto box = build_box(2, 12);
    const auto c = sample_config(box, 0.7, 3);
    const auto a = profile_anneal(c, box->origin(), 36, {}, 3, 9);
    const auto b = profile_anneal(c, box->origin(), 36, {}, 3, 9);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_THROW(profile_anneal(c, box->origin(), 36, {}, 0, 9), DomainError);
}

TEST(Profile, FullLatticeSquares) {
    for (int n : {2, 3, 4}) {
        auto box = build_box(2, 2 * n);
        const auto r = profile(sample_config(box, 1.0, 1), box->origin(), n);
        EXPECT_EQ(r.value, Ratio(4, n)) << n;
        EXPECT_EQ(r.scaled(), Ratio(4, 1));
        EXPECT_EQ(r.witness.size(), static_cast<std::size_t>(n * n));
        EXPECT_EQ(r.mode, n <= 3 ? SolverMode::exact : SolverMode::upper_bound);
        expect_valid_witness(sample_config(box, 1.0, 1), box->origin(), r);
    }
}

TEST(Profile, ZeroCharacterization) {
    for (int s = 0; s < 300; ++s) {
        const double p = std::array{0.2, 0.5, 0.8}[static_cast<std::size_t>(s % 3)];
        auto box = build_box(2, 8);
        const auto c = sample_config(box, p, 9000 + s);
        const auto r = profile(c, box->origin(), 2);
        const auto cl = open_cluster(c, box->origin());
        EXPECT_EQ(r.value.is_zero(), cl.size() <= 4u);
        if (r.value.is_zero()) {
            EXPECT_EQ(r.witness, cl.vertices);
            EXPECT_EQ(r.zero_reason, ZeroReason::cluster_fits_cap);
        } else {
            EXPECT_FALSE(r.zero_reason.has_value());
        }
        expect_valid_witness(c, box->origin(), r);
    }
}

TEST(Profile, CriticalSamplesMostlyZero) {
    int zeros = 0;
    for (int s = 0; s < 200; ++s) {
        auto box = build_box(2, 32);
        ProfileOptions o;
        o.restarts = 2;
        zeros += profile(sample_config(box, 0.5, 20000 + s), box->origin(), 8, o).value.is_zero();
    }
    EXPECT_GE(zeros, 120);
}

TEST(Profile, RejectsBadInput) {
    auto box = build_box(2, 3);
    const auto c = sample_config(box, 0.5, 1);
    EXPECT_THROW(profile(c, box->origin(), 0), DomainError);
    EXPECT_THROW(profile(c, -1, 2), DomainError);
    EXPECT_THROW(checked_power(10, 30), SizeError);
    EXPECT_EQ(checked_power(3, 4), 81);
}

TEST(Supercritical, Proxies) {
    auto box = build_box(2, 6);
    for (auto proxy : {ConditioningProxy::touches_boundary, ConditioningProxy::largest_cluster}) {
        const auto full = supercritical_profile(sample_config(box, 1.0, 1), 2, proxy);
        EXPECT_FALSE(full.discarded);
        EXPECT_EQ(full.value, Ratio(2, 1));
        EXPECT_EQ(full.proxy, proxy);
        const auto closed = supercritical_profile(sample_config(box, 0.0, 1), 2, proxy);
        EXPECT_TRUE(closed.discarded);
        EXPECT_EQ(parse_proxy(to_string(proxy)), proxy);
    }
    EXPECT_THROW(parse_proxy("nope"), ConfigError);
}

TEST(Supercritical, PositiveMedian) {
    std::vector<double> values;
    for (int s = 0; s < 40; ++s) {
        auto box = build_box(2, 64);
        ProfileOptions o;
        o.restarts = 4;
        const auto r = supercritical_profile(sample_config(box, 0.7, 600 + s), 16, ConditioningProxy::touches_boundary, o);
        if (!r.discarded) values.push_back(r.scaled().to_double());
    }
    ASSERT_GE(values.size(), 30u);
    std::sort(values.begin(), values.end());
    EXPECT_GT(values[values.size() / 2], 0.0);
}

TEST(Faces, Extremes) {
    auto box = build_box(2, 5);
    for (const auto& fc : face_connection_counts(sample_config(box, 0.0, 1), 3)) EXPECT_EQ(fc.count, 0);
    for (const auto& fc : face_connection_counts(sample_config(box, 1.0, 1), 3)) EXPECT_EQ(fc.count, 7);
    EXPECT_EQ(all_faces(3).size(), 6u);
    EXPECT_THROW(face_connection_counts(sample_config(box, 1.0, 1), 6), DomainError);
}

TEST(Faces, SmallExample) {
    const auto c = fixtures::small_example();
    EXPECT_EQ(face_connection_count(c, 1, {0, +1}).count, 2);
    EXPECT_EQ(face_connection_count(c, 1, {1, +1}).count, 2);
    EXPECT_EQ(face_connection_count(c, 1, {0, -1}).count, 0);
}

TEST(Faces, SumCoversBoundaryOfConstrainedCluster) {
    for (int s = 0; s < 50; ++s) {
        auto box = build_box(2, 10);
        const auto c = sample_config(box, 0.55, 40 + s);
        const int n = 3 + s % 6;
        const auto counts = face_connection_counts(c, n);
        const auto cl = open_cluster(c, box->origin(), n);
        std::int64_t on_boundary = 0, incidences = 0;
        for (VertexId v : cl.vertices) {
            int faces = 0;
            for (int a = 0; a < 2; ++a) faces += std::abs(box->coord(v, a)) == n;
            on_boundary += faces > 0;
            incidences += faces;
        }
        std::int64_t sum = 0;
        for (const auto& fc : counts) {
            sum += fc.count;
            EXPECT_LE(fc.count, 2 * n + 1);
            EXPECT_EQ(fc.count, face_connection_count(c, n, fc.face).count);
        }
        EXPECT_GE(sum, on_boundary);
        EXPECT_EQ(sum, incidences);
    }
}

TEST(ProfileJson, Fields) {
    const auto c = fixtures::small_example();
    auto r = profile(c, c.lattice().origin(), 1);
    const auto j = to_json(r);
    EXPECT_EQ(j.at("value"), "2/1");
    EXPECT_EQ(j.at("witness_size"), 1);
    EXPECT_EQ(j.at("mode"), "exact");
    EXPECT_EQ(j.at("truncated"), true);  // the cluster reaches the R = 1 boundary
    EXPECT_EQ(j.at("discarded"), false);
    EXPECT_TRUE(j.at("zero_reason").is_null());
}
