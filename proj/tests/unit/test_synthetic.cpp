#include "helpers.hpp"
#include "stylexfer/error.hpp"
#include "stylexfer/style_transfer.hpp"
#include "stylexfer/synthetic.hpp"

#include <gtest/gtest.h>

using namespace stylexfer;

namespace {

// Hexcone hue written out per max channel.
double hue_of(const Vec3& c) {
    const double mx = c.maxCoeff(), mn = c.minCoeff(), d = mx - mn;
    if (d <= 0) return 0.0;
    double h;
    if (mx == c[0]) {
        h = (c[1] - c[2]) / d;
    } else if (mx == c[1]) {
        h = 2.0 + (c[2] - c[0]) / d;
    } else {
        h = 4.0 + (c[0] - c[1]) / d;
    }
    h /= 6.0;
    return h < 0 ? h + 1.0 : h;
}

SyntheticSpec small_spec() {
    SyntheticSpec s;
    s.level = 3;
    s.spots = 3;
    return s;
}

}  // namespace

TEST(Rng, FixedSequence) {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
        EXPECT_EQ(a.normal(), b.normal());
        EXPECT_NEAR(a.unit_vector().norm(), 1.0, 1e-12);
        b.unit_vector();
    }
}

TEST(Generator, DeterministicForSeed) {
    SyntheticSpec spec = small_spec();
    spec.noise = 0.02;
    const SyntheticData a = gen_synthetic(spec, 7), b = gen_synthetic(spec, 7);
    EXPECT_EQ(a.source.vector(channel::kBispectral), b.source.vector(channel::kBispectral));
    EXPECT_EQ(a.ground_truth.scalar(channel::kHue), b.ground_truth.scalar(channel::kHue));
    EXPECT_EQ(a.ground_truth.scalar(channel::kSaturation), b.ground_truth.scalar(channel::kSaturation));
    EXPECT_EQ(a.landmarks.vertex_pairs, b.landmarks.vertex_pairs);
    const SyntheticData c = gen_synthetic(spec, 8);
    EXPECT_NE(a.source.vector(channel::kBispectral), c.source.vector(channel::kBispectral));
}

TEST(Generator, LinearRelationHoldsPerVertex) {
    SyntheticSpec spec = small_spec();
    spec.background_relation = 0.8;
    spec.relation_min = spec.relation_max = 0.8;
    spec.relation_offset = 0.1;
    const SyntheticData d = gen_synthetic(spec, 3);
    for (const Mesh* m : {&d.source, &d.ground_truth}) {
        const auto& rgb = m->vector(channel::kBispectral);
        const auto& s = m->scalar(channel::kSaturation);
        const auto& h = m->scalar(channel::kHue);
        for (int v = 0; v < m->num_vertices(); ++v) {
            const double c = 0.299 * rgb[v][0] + 0.587 * rgb[v][1] + 0.114 * rgb[v][2];
            EXPECT_NEAR(s[v], 0.8 * c + 0.1, 1.0 / 255);
            EXPECT_NEAR(oracle::circular_distance(h[v], hue_of(rgb[v])), 0.0, 1.0 / 255);
        }
    }
}

TEST(Generator, BispectralIsEightBit) {
    const SyntheticData d = gen_synthetic(small_spec(), 4);
    for (const Vec3& c : d.target.vector(channel::kBispectral)) {
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(c[k] * 255.0, std::round(c[k] * 255.0), 1e-9);
    }
}

TEST(Generator, EncodedLuminanceIsConcentration) {
    for (double m : {0.0, 0.3, 0.77}) {
        for (double c : {0.1, 0.4, 0.6}) {
            const Vec3 rgb = encode_bispectral(m, c, 0.3);
            EXPECT_NEAR(0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2], c, 1.0 / 255);
            EXPECT_NEAR(oracle::circular_distance(hue_of(rgb), m), 0.0, 0.02);
        }
    }
}

TEST(Generator, NoSpotsGivesSingleBackgroundPair) {
    SyntheticSpec spec = small_spec();
    spec.spots = 0;
    const SyntheticData d = gen_synthetic(spec, 1);
    EXPECT_TRUE(d.spots.empty());
    TransferOptions o;
    o.order = 4;
    const TransferArtifacts art = style_transfer(d.source, d.target, o);
    EXPECT_EQ(art.src_patches.foreground_count(), 0);
    EXPECT_EQ(art.tar_patches.foreground_count(), 0);
    ASSERT_EQ(art.matches.matches.size(), 1u);
    EXPECT_EQ(art.matches.matches[0].src_id, 0);
    EXPECT_EQ(art.matches.matches[0].tar_id, 0);
}

TEST(Generator, SpotWeightProfile) {
    SpotSpec s;
    s.center = Vec3::UnitZ();
    s.radius = 0.3;
    EXPECT_EQ(spot_weight(s, Vec3::UnitZ(), 0.05), 1.0);
    EXPECT_EQ(spot_weight(s, -Vec3::UnitZ(), 0.05), 0.0);
    const Vec3 rim(std::sin(0.3), 0.0, std::cos(0.3));
    const double w = spot_weight(s, rim, 0.05);
    EXPECT_GT(w, 0.0);
    EXPECT_LT(w, 1.0);
}

TEST(Generator, OvercrowdedPlacementThrows) {
    SyntheticSpec spec = small_spec();
    spec.spots = 60;
    spec.radius_min = spec.radius_max = 0.6;
    EXPECT_THROW(gen_synthetic(spec, 1), InvalidArgument);
}

TEST(Generator, SpecValidation) {
    SyntheticSpec spec;
    spec.shape = "torus";
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = SyntheticSpec{};
    spec.spots = -1;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = SyntheticSpec{};
    spec.band_limited = true;
    EXPECT_THROW(spec.validate(), ConfigError);  // band-limited field needs K = 0
}
