#include "helpers.hpp"
#include "stylexfer/error.hpp"
#include "stylexfer/harmonics.hpp"
#include "stylexfer/shapes.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace stylexfer;
using namespace stylexfer::shapes;
using testing_util::v3;
using testing_util::vec;

TEST(ShBasis, MatchesCartesianTable) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const oracle::V3 d = oracle::random_direction(rng);
        for (int l = 0; l <= 3; ++l) {
            for (int m = -l; m <= l; ++m) EXPECT_NEAR(sh_basis(l, m, vec(d)), oracle::sh_table(l, m, d), 1e-12);
        }
    }
}

TEST(ShBasis, MatchesRodriguesUpToBandTen) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const oracle::V3 d = oracle::random_direction(rng);
        for (int l = 0; l <= 10; ++l) {
            for (int m = -l; m <= l; ++m) EXPECT_NEAR(sh_basis(l, m, vec(d)), oracle::sh_rodrigues(l, m, d), 1e-10);
        }
    }
}

TEST(ShBasis, PolesAndBatchAgree) {
    const int order = 16;
    std::vector<double> all(sh_count(order));
    for (const Vec3& d : {Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(1, 0, 0)}) {
        sh_basis_all(order, d, all);
        for (int l = 0; l <= order; ++l) {
            for (int m = -l; m <= l; ++m) EXPECT_NEAR(all[sh_index(l, m)], sh_basis(l, m, d), 1e-12);
        }
    }
}

TEST(ShBasis, RejectsBadArguments) {
    EXPECT_THROW(sh_basis(1, 2, Vec3::UnitZ()), InvalidArgument);
    EXPECT_THROW(sh_basis(1, 0, Vec3(0, 0, 1.1)), InvalidArgument);
    EXPECT_THROW(PDF(Property::kHue, std::vector<Eigen::VectorXd>{Eigen::VectorXd(1), Eigen::VectorXd(2)}),
                 InvalidArgument);
}

TEST(ShBasis, MonteCarloGramIsIdentity) {
    const int order = 6, n = sh_count(order);
    const int samples = 2'000'000, chunk = 50'000;
    std::mt19937_64 rng(2024);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd y(chunk, n);
    std::vector<double> row(n);
    for (int done = 0; done < samples; done += chunk) {
        for (int s = 0; s < chunk; ++s) {
            sh_basis_all(order, vec(oracle::random_direction(rng)), row);
            for (int c = 0; c < n; ++c) y(s, c) = row[c];
        }
        gram.noalias() += y.transpose() * y;
    }
    gram *= 4 * M_PI / samples;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-2);
}

namespace {

struct SphereGrid {
    std::vector<Vec3> dirs;
    std::vector<double> weights;
};

SphereGrid sphere_grid(int level) {
    const Mesh m = icosphere(level);
    SphereGrid g;
    for (const Vec3& p : m.vertices) g.dirs.push_back(p.normalized());
    g.weights = sphere_vertex_weights(g.dirs, m.faces);
    return g;
}

PDF random_pdf(int order, std::mt19937_64& rng, Property p = Property::kConcentration) {
    std::normal_distribution<double> n;
    Eigen::VectorXd c(sh_count(order));
    for (int i = 0; i < c.size(); ++i) c(i) = n(rng);
    return PDF::from_flat(p, order, c);
}

}  // namespace

TEST(Fit, BandLimitedRoundTripIsExactWithoutRegularization) {
    const SphereGrid g = sphere_grid(5);
    std::mt19937_64 rng(3);
    FitOptions o;
    o.regularization = 0.0;
    for (int order : {4, 16}) {
        const PDF truth = random_pdf(order, rng);
        SphericalSamples s{g.dirs, synthesize(truth, g.dirs), std::vector<char>(g.dirs.size(), 1), g.weights};
        const FitResult r = fit_pdf(s, order, Property::kConcentration, o);
        EXPECT_LT(r.residual_rms, 1e-10) << "order " << order;
        EXPECT_LT((r.pdf.flatten() - truth.flatten()).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Fit, DefaultRegularizationBiasOnPropertyScaleFields) {
    // Fields with values in about [0, 1]: mean 0.5 plus small higher bands.
    const SphereGrid g = sphere_grid(5);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.02);
    Eigen::VectorXd c(sh_count(16));
    for (int i = 0; i < c.size(); ++i) c(i) = n(rng);
    c(0) = 0.5 * std::sqrt(4 * M_PI);
    const PDF truth = PDF::from_flat(Property::kSaturation, 16, c);
    SphericalSamples s{g.dirs, synthesize(truth, g.dirs), std::vector<char>(g.dirs.size(), 1), g.weights};
    EXPECT_LT(fit_pdf(s, 16, Property::kSaturation).residual_rms, 1e-8);
}

TEST(Fit, OrthogonalSolverAgrees) {
    const SphereGrid g = sphere_grid(4);
    std::mt19937_64 rng(4);
    const PDF truth = random_pdf(8, rng);
    const auto values = synthesize(truth, g.dirs);
    const std::vector<char> mask(g.dirs.size(), 1);
    FitOptions o;
    o.solver = FitSolver::kOrthogonal;
    const SphericalFitter qr(g.dirs, g.weights, 8, o);
    const SphericalFitter ne(g.dirs, g.weights, 8);
    const auto a = qr.fit(Property::kConcentration, values, mask);
    const auto b = ne.fit(Property::kConcentration, values, mask);
    EXPECT_LT((a.pdf.flatten() - b.pdf.flatten()).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Fit, ConstantFieldHasOnlyBandZero) {
    const SphereGrid g = sphere_grid(4);
    SphericalSamples s{g.dirs, std::vector<double>(g.dirs.size(), 1.0), std::vector<char>(g.dirs.size(), 1), g.weights};
    const FitResult r = fit_pdf(s, 6, Property::kSaturation);
    EXPECT_NEAR(r.pdf.coefficient(0, 0), std::sqrt(4 * M_PI), 1e-6);
    const auto norms = band_norms(r.pdf);
    for (std::size_t i = 1; i < norms.size(); ++i) EXPECT_LT(norms[i], 1e-6);
}

TEST(Fit, RotationKeepsBandNorms) {
    const SphereGrid g = sphere_grid(5);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const PDF truth = random_pdf(6, rng);
        const auto rot = oracle::random_rotation(rng);
        std::vector<double> rotated(g.dirs.size());
        for (std::size_t v = 0; v < g.dirs.size(); ++v) {
            rotated[v] = eval_pdf(truth, vec(oracle::rotate(rot, v3(g.dirs[v]))));
        }
        const SphericalFitter fitter(g.dirs, g.weights, 6);
        const auto fitted = fitter.fit(Property::kConcentration, rotated, std::vector<char>(g.dirs.size(), 1));
        const auto a = band_norms(truth), b = band_norms(fitted.pdf);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6) << "band " << i;
    }
}

TEST(Fit, RankDeficientWithoutRegularizationThrows) {
    const std::vector<Vec3> dirs{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    FitOptions o;
    o.regularization = 0.0;
    const std::vector<double> values{1, 2, 3};
    EXPECT_THROW(SphericalFitter(dirs, {}, 2, o).fit(Property::kHue, values, std::vector<char>(3, 1)), NumericalError);
    o.regularization = 1e-8;
    EXPECT_NO_THROW(SphericalFitter(dirs, {}, 2, o).fit(Property::kHue, values, std::vector<char>(3, 1)));
}

TEST(Fit, DropMaskIgnoresOutside) {
    const SphereGrid g = sphere_grid(4);
    std::mt19937_64 rng(6);
    const PDF truth = random_pdf(3, rng);
    auto values = synthesize(truth, g.dirs);
    std::vector<char> mask(g.dirs.size(), 0);
    for (std::size_t v = 0; v < g.dirs.size(); ++v) {
        if (g.dirs[v].z() > -0.2) {
            mask[v] = 1;
        } else {
            values[v] = 1e3;  // garbage outside the mask
        }
    }
    FitOptions o;
    o.outside = OutsideMask::kDrop;
    const SphericalFitter fitter(g.dirs, g.weights, 3, o);
    const auto r = fitter.fit(Property::kConcentration, values, mask);
    EXPECT_LT(r.residual_mean_abs, 1e-6);
}

TEST(Pdf, FlatIndexing) {
    std::mt19937_64 rng(7);
    const PDF p = random_pdf(5, rng);
    const Eigen::VectorXd flat = p.flatten();
    for (int l = 0; l <= 5; ++l) {
        for (int m = -l; m <= l; ++m) EXPECT_EQ(flat(sh_index(l, m)), p.coefficient(l, m));
    }
    EXPECT_EQ(PDF::from_flat(p.property(), 5, flat), p);
    EXPECT_EQ(parse_property(property_name(Property::kComposition)), Property::kComposition);
}
