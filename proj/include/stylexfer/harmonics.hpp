#pragma once

#include "stylexfer/mesh.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylexfer {

/// Property a PDF describes.
enum class Property { kCurvature, kComposition, kConcentration, kHue, kSaturation };

std::string_view property_name(Property p);
Property parse_property(std::string_view name);
/// Per-vertex channel that holds the property's samples.
std::string_view property_channel(Property p);

/// Flat index of coefficient (l, m), m in [-l, l].
constexpr int sh_index(int l, int m) { return l * l + l + m; }
/// Coefficient count for bands 0..order.
constexpr int sh_count(int order) { return (order + 1) * (order + 1); }

/// Real orthonormal spherical harmonic Y_l^m at a unit direction, without the
/// Condon-Shortley phase. m > 0 uses cos(m phi), m < 0 uses sin(|m| phi).
/// Throws InvalidArgument when |m| > l or |dir| deviates from 1 by > 1e-6.
double sh_basis(int l, int m, const Vec3& dir);

/// All (order+1)^2 basis values at dir, indexed by sh_index. No norm check.
void sh_basis_all(int order, const Vec3& dir, std::span<double> out);

/// Property distribution function: one coefficient vector per band
/// (band i has 2i+1 entries).
class PDF {
public:
    PDF() = default;
    PDF(Property property, int order);
    /// Throws InvalidArgument when band sizes are not 1, 3, 5, ...
    PDF(Property property, std::vector<Eigen::VectorXd> bands);

    static PDF from_flat(Property property, int order, const Eigen::VectorXd& coefficients);

    Property property() const { return property_; }
    void set_property(Property p) { property_ = p; }
    int order() const { return static_cast<int>(bands_.size()) - 1; }

    const Eigen::VectorXd& band(int i) const { return bands_.at(i); }
    Eigen::VectorXd& band(int i) { return bands_.at(i); }
    const std::vector<Eigen::VectorXd>& bands() const { return bands_; }

    double coefficient(int l, int m) const { return bands_.at(l)(l + m); }
    int coefficient_count() const { return sh_count(order()); }
    Eigen::VectorXd flatten() const;

    bool operator==(const PDF& other) const;

private:
    Property property_ = Property::kConcentration;
    std::vector<Eigen::VectorXd> bands_;
};

/// Samples of a scalar field on the sphere. Empty weights mean unit weights.
struct SphericalSamples {
    std::vector<Vec3> directions;
    std::vector<double> values;
    std::vector<char> mask;
    std::vector<double> weights;

    /// Lengths agree and directions are unit within 1e-6.
    void validate() const;
};

/// Barycentric-lumped vertex areas of a triangle mesh on the unit sphere.
std::vector<double> sphere_vertex_weights(std::span<const Vec3> sphere_positions, std::span<const Face> faces);

enum class OutsideMask {
    kZero,  ///< samples outside the mask are fitted as exact zeros with full weight
    kDrop,  ///< samples outside the mask are ignored
};

enum class FitSolver { kNormalEquations, kOrthogonal };

struct FitOptions {
    double regularization = 1e-8;
    OutsideMask outside = OutsideMask::kZero;
    FitSolver solver = FitSolver::kNormalEquations;
};

struct FitResult {
    PDF pdf;
    /// Weighted RMS of (target - fit) over the samples that entered the fit.
    double residual_rms = 0.0;
    /// Mean |target - fit| over masked samples.
    double residual_mean_abs = 0.0;
};

/// Least-squares spherical-harmonic fitter for a fixed set of directions and
/// weights. The design matrix and (for kZero fits) the factorized normal
/// matrix are shared across fits, so fitting many channels and patches on
/// one sphere costs one factorization.
class SphericalFitter {
public:
    SphericalFitter(std::vector<Vec3> directions, std::vector<double> weights, int order, FitOptions options = {});

    int order() const { return order_; }
    std::size_t sample_count() const { return directions_.size(); }
    const FitOptions& options() const { return options_; }

    /// Minimizes sum_v w_v (target_v - sum c Y(dir_v))^2 + regularization |c|^2,
    /// where target_v = values_v inside the mask. Throws NumericalError on
    /// rank-deficient normal equations without regularization.
    FitResult fit(Property property, std::span<const double> values, std::span<const char> mask) const;

    /// PDF values at every sample direction.
    std::vector<double> evaluate(const PDF& pdf) const;
    double evaluate_at(const PDF& pdf, std::size_t sample) const;

private:
    Eigen::VectorXd solve(const Eigen::VectorXd& target, std::span<const char> mask) const;

    std::vector<Vec3> directions_;
    std::vector<double> weights_;
    int order_;
    FitOptions options_;
    Eigen::MatrixXd design_;  // samples x coefficients
    std::optional<Eigen::LDLT<Eigen::MatrixXd>> normal_;
};

/// One-shot fit of samples into a PDF of the given order.
FitResult fit_pdf(const SphericalSamples& samples, int order, Property property, const FitOptions& options = {});

/// sum_{i,m} band_i[m] * Y_i^m(dir).
double eval_pdf(const PDF& pdf, const Vec3& dir);

/// Field values of a PDF at the given directions.
std::vector<double> synthesize(const PDF& pdf, std::span<const Vec3> directions);

/// Euclidean norm of each band vector.
std::vector<double> band_norms(const PDF& pdf);

}  // namespace stylexfer
