#include "stylexfer/harmonics.hpp"

#include "stylexfer/error.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace stylexfer {

std::string_view property_name(Property p) {
    switch (p) {
        case Property::kCurvature: return "curvature";
        case Property::kComposition: return "composition";
        case Property::kConcentration: return "concentration";
        case Property::kHue: return "hue";
        case Property::kSaturation: return "saturation";
    }
    return "unknown";
}

Property parse_property(std::string_view name) {
    for (Property p : {Property::kCurvature, Property::kComposition, Property::kConcentration, Property::kHue,
                       Property::kSaturation}) {
        if (property_name(p) == name) return p;
    }
    throw InvalidArgument("unknown property '" + std::string(name) + "'");
}

std::string_view property_channel(Property p) { return property_name(p); }

void sh_basis_all(int order, const Vec3& dir, std::span<double> out) {
    const int count = sh_count(order);
    if (static_cast<int>(out.size()) < count) throw InvalidArgument("basis output buffer too small");
    const double z = std::clamp(dir.z(), -1.0, 1.0);
    const double s = std::hypot(dir.x(), dir.y());
    const double cphi = s > 0 ? dir.x() / s : 1.0;
    const double sphi = s > 0 ? dir.y() / s : 0.0;

    // Normalized associated Legendre values, walked column by column in m.
    double pmm = 0.5 / std::sqrt(std::numbers::pi);  // P(0,0)
    double cos_m = 1.0;
    double sin_m = 0.0;
    for (int m = 0; m <= order; ++m) {
        if (m > 0) {
            pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
            const double c = cos_m * cphi - sin_m * sphi;
            sin_m = sin_m * cphi + cos_m * sphi;
            cos_m = c;
        }
        const double cs = m == 0 ? 1.0 : std::numbers::sqrt2 * cos_m;
        const double sn = std::numbers::sqrt2 * sin_m;
        double p_prev = 0.0;
        double p_cur = pmm;
        for (int l = m; l <= order; ++l) {
            if (l == m + 1) {
                p_prev = p_cur;
                p_cur = std::sqrt(2.0 * m + 3.0) * z * pmm;
            } else if (l > m + 1) {
                const double ll = l;
                const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - m * m));
                const double b = std::sqrt(((ll - 1) * (ll - 1) - m * m) / (4.0 * (ll - 1) * (ll - 1) - 1.0));
                const double next = a * (z * p_cur - b * p_prev);
                p_prev = p_cur;
                p_cur = next;
            }
            if (m == 0) {
                out[sh_index(l, 0)] = p_cur;
            } else {
                out[sh_index(l, m)] = cs * p_cur;
                out[sh_index(l, -m)] = sn * p_cur;
            }
        }
    }
}

double sh_basis(int l, int m, const Vec3& dir) {
    if (l < 0 || std::abs(m) > l) {
        throw InvalidArgument("invalid harmonic index l=" + std::to_string(l) + " m=" + std::to_string(m));
    }
    if (std::abs(dir.norm() - 1.0) > 1e-6) throw InvalidArgument("direction is not unit length");
    std::vector<double> all(sh_count(l));
    sh_basis_all(l, dir, all);
    return all[sh_index(l, m)];
}

PDF::PDF(Property property, int order) : property_(property) {
    if (order < 0) throw InvalidArgument("PDF order must be non-negative");
    bands_.reserve(order + 1);
    for (int i = 0; i <= order; ++i) bands_.push_back(Eigen::VectorXd::Zero(2 * i + 1));
}

PDF::PDF(Property property, std::vector<Eigen::VectorXd> bands) : property_(property), bands_(std::move(bands)) {
    if (bands_.empty()) throw InvalidArgument("PDF needs at least band 0");
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        if (bands_[i].size() != static_cast<Eigen::Index>(2 * i + 1)) {
            throw InvalidArgument("PDF band " + std::to_string(i) + " has " + std::to_string(bands_[i].size()) +
                                  " coefficients, expected " + std::to_string(2 * i + 1));
        }
    }
}

PDF PDF::from_flat(Property property, int order, const Eigen::VectorXd& c) {
    if (c.size() != sh_count(order)) throw InvalidArgument("flat coefficient vector has wrong length");
    PDF pdf(property, order);
    for (int l = 0; l <= order; ++l) pdf.bands_[l] = c.segment(l * l, 2 * l + 1);
    return pdf;
}

Eigen::VectorXd PDF::flatten() const {
    Eigen::VectorXd c(coefficient_count());
    for (int l = 0; l <= order(); ++l) c.segment(l * l, 2 * l + 1) = bands_[l];
    return c;
}

bool PDF::operator==(const PDF& other) const {
    if (property_ != other.property_ || bands_.size() != other.bands_.size()) return false;
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        if (bands_[i] != other.bands_[i]) return false;
    }
    return true;
}

void SphericalSamples::validate() const {
    const std::size_t n = directions.size();
    if (values.size() != n || mask.size() != n || (!weights.empty() && weights.size() != n)) {
        throw InvalidArgument("spherical samples have inconsistent lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(directions[i].norm() - 1.0) > 1e-6) {
            throw InvalidArgument("sample direction " + std::to_string(i) + " is not unit length");
        }
    }
}

std::vector<double> sphere_vertex_weights(std::span<const Vec3> sphere_positions, std::span<const Face> faces) {
    return vertex_areas(sphere_positions, faces);
}

SphericalFitter::SphericalFitter(std::vector<Vec3> directions, std::vector<double> weights, int order,
                                 FitOptions options)
    : directions_(std::move(directions)), weights_(std::move(weights)), order_(order), options_(options) {
    if (order_ < 0) throw InvalidArgument("fit order must be non-negative");
    if (weights_.empty()) weights_.assign(directions_.size(), 1.0);
    if (weights_.size() != directions_.size()) throw InvalidArgument("weights and directions differ in length");
    if (options_.regularization < 0) throw InvalidArgument("regularization must be non-negative");

    const int n = sh_count(order_);
    design_.resize(static_cast<Eigen::Index>(directions_.size()), n);
    std::vector<double> row(n);
    for (std::size_t v = 0; v < directions_.size(); ++v) {
        sh_basis_all(order_, directions_[v], row);
        for (int j = 0; j < n; ++j) design_(static_cast<Eigen::Index>(v), j) = row[j];
    }
    if (options_.outside == OutsideMask::kZero && options_.solver == FitSolver::kNormalEquations) {
        const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(weights_.data(), weights_.size()).cwiseSqrt();
        const Eigen::MatrixXd scaled = sw.asDiagonal() * design_;
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
        gram = gram.selfadjointView<Eigen::Lower>();
        gram.diagonal().array() += options_.regularization;
        normal_.emplace(gram);
        const auto d = normal_->vectorD().cwiseAbs();
        if (options_.regularization == 0.0 && d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff())) {
            throw NumericalError("rank-deficient normal equations at order " + std::to_string(order_) +
                                 " without regularization");
        }
    }
}

Eigen::VectorXd SphericalFitter::solve(const Eigen::VectorXd& target, std::span<const char> mask) const {
    const Eigen::Index n = design_.cols();
    const Eigen::Index rows = design_.rows();
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights_.data(), static_cast<Eigen::Index>(weights_.size()));
    if (options_.outside == OutsideMask::kDrop) {
        for (Eigen::Index v = 0; v < rows; ++v) {
            if (!mask[v]) w(v) = 0.0;
        }
    }
    if (options_.solver == FitSolver::kNormalEquations) {
        const Eigen::VectorXd rhs = design_.transpose() * w.cwiseProduct(target);
        if (normal_) return normal_->solve(rhs);
        const Eigen::VectorXd sw = w.cwiseSqrt();
        const Eigen::MatrixXd scaled = sw.asDiagonal() * design_;
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
        gram = gram.selfadjointView<Eigen::Lower>();
        gram.diagonal().array() += options_.regularization;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        const auto d = ldlt.vectorD().cwiseAbs();
        if (options_.regularization == 0.0 && d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff())) {
            throw NumericalError("rank-deficient normal equations for masked fit without regularization");
        }
        return ldlt.solve(rhs);
    }
    // Orthogonal route: QR of the weighted design stacked on sqrt(lambda) I.
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const bool reg = options_.regularization > 0;
    Eigen::MatrixXd a(rows + (reg ? n : 0), n);
    a.topRows(rows) = sw.asDiagonal() * design_;
    Eigen::VectorXd b(a.rows());
    b.head(rows) = sw.cwiseProduct(target);
    if (reg) {
        a.bottomRows(n) = std::sqrt(options_.regularization) * Eigen::MatrixXd::Identity(n, n);
        b.tail(n).setZero();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < n) throw NumericalError("rank-deficient design matrix without regularization");
    return qr.solve(b);
}

FitResult SphericalFitter::fit(Property property, std::span<const double> values, std::span<const char> mask) const {
    if (values.size() != directions_.size() || mask.size() != directions_.size()) {
        throw InvalidArgument("fit input length differs from the fitter's sample count");
    }
    const auto rows = static_cast<Eigen::Index>(values.size());
    Eigen::VectorXd target(rows);
    for (Eigen::Index v = 0; v < rows; ++v) target(v) = mask[v] ? values[v] : 0.0;

    const Eigen::VectorXd coeffs = solve(target, mask);
    FitResult result{PDF::from_flat(property, order_, coeffs), 0.0, 0.0};

    const Eigen::VectorXd fitted = design_ * coeffs;
    double wsum = 0.0, wsq = 0.0, abs_sum = 0.0;
    std::size_t inside = 0;
    for (Eigen::Index v = 0; v < rows; ++v) {
        const double r = target(v) - fitted(v);
        if (mask[v] || options_.outside == OutsideMask::kZero) {
            wsum += weights_[v];
            wsq += weights_[v] * r * r;
        }
        if (mask[v]) {
            abs_sum += std::abs(r);
            ++inside;
        }
    }
    result.residual_rms = wsum > 0 ? std::sqrt(wsq / wsum) : 0.0;
    result.residual_mean_abs = inside > 0 ? abs_sum / inside : 0.0;
    return result;
}

std::vector<double> SphericalFitter::evaluate(const PDF& pdf) const {
    if (pdf.order() != order_) throw InvalidArgument("PDF order differs from fitter order");
    const Eigen::VectorXd vals = design_ * pdf.flatten();
    return {vals.data(), vals.data() + vals.size()};
}

double SphericalFitter::evaluate_at(const PDF& pdf, std::size_t sample) const {
    if (pdf.order() != order_) throw InvalidArgument("PDF order differs from fitter order");
    return design_.row(static_cast<Eigen::Index>(sample)).dot(pdf.flatten());
}

FitResult fit_pdf(const SphericalSamples& samples, int order, Property property, const FitOptions& options) {
    samples.validate();
    std::size_t masked = 0;
    for (char m : samples.mask) masked += m != 0;
    const std::size_t needed = static_cast<std::size_t>(sh_count(order));
    const std::size_t usable = options.outside == OutsideMask::kZero ? samples.directions.size() : masked;
    if (options.regularization == 0.0 && usable < needed) {
        throw NumericalError("only " + std::to_string(usable) + " samples for " + std::to_string(needed) +
                             " coefficients without regularization");
    }
    SphericalFitter fitter(samples.directions, samples.weights, order, options);
    return fitter.fit(property, samples.values, samples.mask);
}

double eval_pdf(const PDF& pdf, const Vec3& dir) {
    std::vector<double> basis(pdf.coefficient_count());
    sh_basis_all(pdf.order(), dir, basis);
    double sum = 0.0;
    for (int l = 0; l <= pdf.order(); ++l) {
        const auto& band = pdf.band(l);
        for (int m = -l; m <= l; ++m) sum += band(l + m) * basis[sh_index(l, m)];
    }
    return sum;
}

std::vector<double> synthesize(const PDF& pdf, std::span<const Vec3> directions) {
    std::vector<double> out;
    out.reserve(directions.size());
    for (const auto& d : directions) out.push_back(eval_pdf(pdf, d));
    return out;
}

std::vector<double> band_norms(const PDF& pdf) {
    std::vector<double> norms;
    norms.reserve(pdf.bands().size());
    for (const auto& b : pdf.bands()) norms.push_back(b.norm());
    return norms;
}

}  // namespace stylexfer
