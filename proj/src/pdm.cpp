#include "stylexfer/pdm.hpp"

#include "stylexfer/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace stylexfer {

namespace {

constexpr double kZeroBand = 1e-12;

Eigen::MatrixXd reflector(const Eigen::VectorXd& w) {
    const auto n = w.size();
    return Eigen::MatrixXd::Identity(n, n) - 2.0 * w * w.transpose();
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

PDM build(const PDF& src, const PDF& tar) {
    if (src.order() != tar.order()) {
        throw InvalidArgument("PDF orders differ: " + std::to_string(src.order()) + " vs " +
                              std::to_string(tar.order()));
    }
    PDM pdm;
    pdm.from = src.property();
    pdm.to = tar.property();
    for (int i = 0; i <= src.order(); ++i) {
        const Eigen::VectorXd& a = src.band(i);
        const Eigen::VectorXd& b = tar.band(i);
        const auto dim = a.size();
        const double la = a.norm();
        const double lb = b.norm();
        pdm.src_norms.push_back(la);
        pdm.tar_norms.push_back(lb);
        Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::MatrixXd t = Eigen::MatrixXd::Identity(dim, dim);
        if (la < kZeroBand) {
            if (lb >= kZeroBand) pdm.excluded.push_back(i);
        } else if (lb < kZeroBand) {
            t.setZero();
        } else if (a != b) {
            bool improper = false;
            rot = householder_rotation(a / la, b / lb, &improper);
            if (improper) pdm.improper.push_back(i);
            t = (lb / la) * rot;
        }
        pdm.rotations.push_back(std::move(rot));
        pdm.bands.push_back(std::move(t));
    }
    return pdm;
}

// Conjugated chain scale * R_mm T R_mm^T; the scales of the material map
// cancel, so only its rotation enters.
PDM chain(const PDM& tau, const PDM& q, Property out, const std::vector<double>& scale) {
    if (tau.order() != q.order()) throw InvalidArgument("material map and PDM orders differ");
    PDM result;
    result.from = out;
    result.to = out;
    result.scaled_rotations = false;
    for (int i = 0; i <= q.order(); ++i) {
        Eigen::MatrixXd t;
        if (tau.is_excluded(i) || tau.is_singular(i)) {
            t = scale[i] * q.bands[i];
        } else {
            t = scale[i] * (tau.rotations[i] * q.bands[i] * tau.rotations[i].transpose());
        }
        const auto dim = t.rows();
        result.rotations.push_back(Eigen::MatrixXd::Identity(dim, dim));
        result.src_norms.push_back(1.0);
        result.tar_norms.push_back(1.0);
        result.bands.push_back(std::move(t));
        if (q.is_excluded(i)) result.excluded.push_back(i);
    }
    return result;
}

}  // namespace

Eigen::MatrixXd householder_rotation(const Eigen::VectorXd& u, const Eigen::VectorXd& v, bool* improper) {
    if (u.size() != v.size() || u.size() == 0) throw InvalidArgument("rotation needs vectors of equal nonzero length");
    if (improper) *improper = false;
    const auto dim = u.size();
    if (u == v) return Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::VectorXd sum = u + v;
    const double len = sum.norm();
    if (len > 1e-8) return reflector(v) * reflector(sum / len);
    if (dim == 1) {
        if (improper) *improper = true;
        return -Eigen::MatrixXd::Identity(1, 1);
    }
    // Antipodal: reflect u onto -u, then across a direction orthogonal to u.
    Eigen::Index k;
    u.cwiseAbs().minCoeff(&k);
    Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, k);
    e -= e.dot(u) * u;
    e.normalize();
    return reflector(e) * reflector(u);
}

bool PDM::is_excluded(int band) const { return contains(excluded, band); }

bool PDM::is_singular(int band) const { return !is_excluded(band) && bands[band].isZero(0.0); }

PDM identity_pdm(Property property, int order) {
    PDM pdm;
    pdm.from = property;
    pdm.to = property;
    for (int i = 0; i <= order; ++i) {
        pdm.bands.push_back(Eigen::MatrixXd::Identity(2 * i + 1, 2 * i + 1));
        pdm.rotations.push_back(Eigen::MatrixXd::Identity(2 * i + 1, 2 * i + 1));
        pdm.src_norms.push_back(1.0);
        pdm.tar_norms.push_back(1.0);
    }
    return pdm;
}

PDM compute_pdm(const PDF& src, const PDF& tar) {
    if (src.property() != tar.property()) {
        throw InvalidArgument("PDM needs PDFs of one property, got " + std::string(property_name(src.property())) +
                              " and " + std::string(property_name(tar.property())));
    }
    return build(src, tar);
}

PDM compute_material_map(const PDF& material, const PDF& appearance) { return build(material, appearance); }

double pdm_cost(const PDM& pdm) {
    double cost = 0.0;
    for (int i = 0; i <= pdm.order(); ++i) {
        if (pdm.is_excluded(i)) continue;
        cost += std::abs(1.0 - pdm.bands[i].determinant());
    }
    return cost;
}

double frequency_weight(int band, int order, double f_s, bool raw) {
    const double sigma = (order + 1) + f_s * band;
    return raw ? sigma : sigma / (order + 1);
}

PDM saturation_transform(const PDM& tau_cs, const PDM& q_c, double mu_s, double f_s, bool raw_sigma) {
    std::vector<double> scale;
    for (int i = 0; i <= q_c.order(); ++i) scale.push_back(mu_s * frequency_weight(i, q_c.order(), f_s, raw_sigma));
    return chain(tau_cs, q_c, Property::kSaturation, scale);
}

PDM hue_transform(const PDM& tau_mh, const PDM& q_m, double mu_h) {
    return chain(tau_mh, q_m, Property::kHue, std::vector<double>(q_m.order() + 1, mu_h));
}

PDF apply_pdm(const PDM& pdm, const PDF& pdf) {
    if (pdm.order() != pdf.order()) throw InvalidArgument("PDM and PDF orders differ");
    std::vector<Eigen::VectorXd> bands;
    for (int i = 0; i <= pdf.order(); ++i) bands.push_back(pdm.bands[i] * pdf.band(i));
    return PDF(pdm.to, std::move(bands));
}

PDM inverse(const PDM& pdm) {
    PDM inv;
    inv.from = pdm.to;
    inv.to = pdm.from;
    inv.excluded = pdm.excluded;
    inv.improper = pdm.improper;
    inv.scaled_rotations = pdm.scaled_rotations;
    for (int i = 0; i <= pdm.order(); ++i) {
        if (pdm.is_singular(i)) throw NumericalError("band " + std::to_string(i) + " of the map is singular");
        Eigen::MatrixXd b;
        if (pdm.is_excluded(i) || (pdm.scaled_rotations && pdm.src_norms[i] < kZeroBand)) {
            b = pdm.bands[i];
        } else if (!pdm.scaled_rotations) {
            b = pdm.bands[i].inverse();
        } else {
            b = (pdm.src_norms[i] / pdm.tar_norms[i]) * pdm.rotations[i].transpose();
        }
        inv.bands.push_back(std::move(b));
        inv.rotations.push_back(pdm.rotations[i].transpose());
        inv.src_norms.push_back(pdm.tar_norms[i]);
        inv.tar_norms.push_back(pdm.src_norms[i]);
    }
    return inv;
}

}  // namespace stylexfer
