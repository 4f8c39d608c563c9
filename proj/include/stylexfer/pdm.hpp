#pragma once

#include "stylexfer/harmonics.hpp"

#include <Eigen/Core>

#include <vector>

namespace stylexfer {

/// Proper rotation taking unit vector u to unit vector v, built from two
/// Householder reflections: across the bisector of u and v, then across v.
/// In one dimension opposite signs admit no proper rotation; -1 is returned
/// and *improper is set.
Eigen::MatrixXd householder_rotation(const Eigen::VectorXd& u, const Eigen::VectorXd& v, bool* improper = nullptr);

/// Property distribution map: one (2i+1)x(2i+1) matrix per band, each a
/// scaled rotation (l_tar / l_src) R. A material map uses the same type with
/// differing from/to properties.
struct PDM {
    Property from = Property::kConcentration;
    Property to = Property::kConcentration;
    std::vector<Eigen::MatrixXd> bands;
    std::vector<Eigen::MatrixXd> rotations;
    std::vector<double> src_norms;
    std::vector<double> tar_norms;
    /// Bands whose source vector vanishes while the target does not. Their
    /// matrix is the identity and they are left out of costs and chains.
    std::vector<int> excluded;
    /// One-dimensional bands whose signs differ (matrix -1, not a rotation).
    std::vector<int> improper;
    /// Bands are (tar_norm / src_norm) * rotation. False for composed chains,
    /// whose bands are general matrices.
    bool scaled_rotations = true;

    int order() const { return static_cast<int>(bands.size()) - 1; }
    bool is_excluded(int band) const;
    /// Band maps a nonzero vector to zero: no inverse exists.
    bool is_singular(int band) const;
};

/// Identity map of the given order.
PDM identity_pdm(Property property, int order);

/// Per-band scaled rotations taking src onto tar. Bands where both vectors
/// vanish map by the identity; a vanishing target band gives the zero matrix.
/// Throws InvalidArgument on differing orders or properties.
PDM compute_pdm(const PDF& src, const PDF& tar);

/// compute_pdm between two different properties of one patch.
PDM compute_material_map(const PDF& material, const PDF& appearance);

/// sum over non-excluded bands of |1 - det T^i|.
double pdm_cost(const PDM& pdm);

/// Per-band frequency weight. Raw form (n + 1) + f_s i; normalized form
/// divides by (n + 1) so f_s = 0 weights every band by 1.
double frequency_weight(int band, int order, double f_s, bool raw = false);

/// T_s^i = mu_s sigma^i (T_cs^i T_c^i (T_cs^i)^-1). Bands where the material
/// map is excluded or singular fall back to mu_s sigma^i T_c^i.
PDM saturation_transform(const PDM& tau_cs, const PDM& q_c, double mu_s, double f_s, bool raw_sigma = false);

/// T_h^i = mu_h (T_mh^i T_m^i (T_mh^i)^-1), same fallback.
PDM hue_transform(const PDM& tau_mh, const PDM& q_m, double mu_h);

/// Per-band matrix-vector product; the result carries pdm.to.
PDF apply_pdm(const PDM& pdm, const PDF& pdf);

/// Band-wise inverse (l_src / l_tar) R^T. Throws NumericalError on singular
/// bands.
PDM inverse(const PDM& pdm);

}  // namespace stylexfer
