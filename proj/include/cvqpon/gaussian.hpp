// Copyright 2026 The cvqpon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVQPON_GAUSSIAN_HPP
#define CVQPON_GAUSSIAN_HPP

/// @file gaussian.hpp
/// Mode-labeled Gaussian-state algebra over quadrature covariance matrices.
///
/// Conventions used throughout the library:
///  - shot-noise units (SNU): vacuum quadrature variance = 1;
///  - xpxp ordering: mode m occupies rows/columns 2m (x) and 2m+1 (p);
///  - all states are zero-mean, so second moments carry all information;
///  - entropies are in bits (log base 2).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqpon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Role of a mode within the network model.
enum class ModeKind {
    alice_x,         ///< Alice's retained heterodyne arm used for x
    alice_p,         ///< Alice's retained heterodyne arm used for p
    signal,          ///< broadcast signal mode before/while splitting
    user_arm,        ///< a user's received mode (pre-split: arm == none)
    detector_noise,  ///< detector thermal mode mixed into a user arm ("D")
    purifier,        ///< untouched partner of the detector thermal mode ("F")
    eve_ancilla,     ///< channel ancilla held by the eavesdropper
    aux_vacuum,      ///< transient vacuum mode consumed during assembly
};

/// Which quadrature a mode (or measurement) is associated with.
enum class Arm { x, p, none };

/// Unique identity of one mode inside a labeled state.
struct ModeLabel {
    ModeKind kind = ModeKind::aux_vacuum;
    int user = -1;    ///< user index for per-user modes, -1 otherwise
    Arm arm = Arm::none;
    int serial = 0;   ///< disambiguates ancilla/vacuum modes

    friend bool operator==(const ModeLabel& a, const ModeLabel& b) {
        return a.kind == b.kind && a.user == b.user && a.arm == b.arm && a.serial == b.serial;
    }
    friend bool operator!=(const ModeLabel& a, const ModeLabel& b) { return !(a == b); }
};

inline std::string to_string(const ModeLabel& m) {
    static const char* kind_names[] = {"alice_x", "alice_p", "signal",   "user_arm",
                                       "detector_noise",     "purifier", "eve_ancilla",
                                       "aux_vacuum"};
    std::ostringstream os;
    os << kind_names[static_cast<int>(m.kind)];
    os << '(';
    bool first = true;
    if (m.user >= 0) {
        os << "user=" << m.user;
        first = false;
    }
    if (m.arm != Arm::none) {
        os << (first ? "" : ",") << "arm=" << (m.arm == Arm::x ? 'x' : 'p');
        first = false;
    }
    if (m.serial != 0) {
        os << (first ? "" : ",") << "serial=" << m.serial;
    }
    os << ')';
    return os.str();
}

/// Convenience factories for the labels used by the network model.
inline ModeLabel alice_x_label() { return {ModeKind::alice_x, -1, Arm::none, 0}; }
inline ModeLabel alice_p_label() { return {ModeKind::alice_p, -1, Arm::none, 0}; }
inline ModeLabel signal_label() { return {ModeKind::signal, -1, Arm::none, 0}; }
inline ModeLabel user_label(int user, Arm arm = Arm::none) {
    return {ModeKind::user_arm, user, arm, 0};
}
inline ModeLabel detector_noise_label(int user, Arm arm) {
    return {ModeKind::detector_noise, user, arm, 0};
}
inline ModeLabel purifier_label(int user, Arm arm) { return {ModeKind::purifier, user, arm, 0}; }
inline ModeLabel eve_label(int serial) { return {ModeKind::eve_ancilla, -1, Arm::none, serial}; }
inline ModeLabel vacuum_label(int serial) { return {ModeKind::aux_vacuum, -1, Arm::none, serial}; }

/// Symplectic form for n modes in xpxp ordering: direct sum of [[0,1],[-1,0]].
inline Matrix symplectic_form(int n_modes) {
    Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

/// A zero-mean Gaussian state: real symmetric covariance matrix plus one
/// label per mode. Construction validates shape, symmetry and finiteness;
/// the (more expensive) physicality check is `is_bona_fide`.
class GaussianState {
public:
    GaussianState(Matrix cov, std::vector<ModeLabel> labels)
        : cov_(std::move(cov)), labels_(std::move(labels)) {
        const auto n = static_cast<Eigen::Index>(labels_.size());
        if (cov_.rows() != 2 * n || cov_.cols() != 2 * n) {
            throw std::invalid_argument("covariance matrix size " + std::to_string(cov_.rows()) +
                                        "x" + std::to_string(cov_.cols()) +
                                        " does not match 2x mode count " + std::to_string(n));
        }
        if (!cov_.allFinite()) {
            throw std::invalid_argument("covariance matrix has non-finite entries");
        }
        const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
        if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw std::invalid_argument("covariance matrix is not symmetric");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            for (std::size_t j = i + 1; j < labels_.size(); ++j) {
                if (labels_[i] == labels_[j]) {
                    throw std::invalid_argument("duplicate mode label " + to_string(labels_[i]));
                }
            }
        }
        cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();  // remove rounding skew
    }

    int n_modes() const { return static_cast<int>(labels_.size()); }
    const Matrix& cov() const { return cov_; }
    const std::vector<ModeLabel>& labels() const { return labels_; }

    /// Index of a mode, or throws with a readable message.
    int index_of(const ModeLabel& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) {
            throw std::invalid_argument("mode " + to_string(label) + " not present in state");
        }
        return static_cast<int>(it - labels_.begin());
    }

    bool has(const ModeLabel& label) const {
        return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
    }

    /// 2x2 covariance block between modes i and j.
    Eigen::Block<const Matrix, 2, 2> block(int i, int j) const {
        return cov_.block<2, 2>(2 * i, 2 * j);
    }

private:
    Matrix cov_;
    std::vector<ModeLabel> labels_;
};

/// n-mode vacuum with caller-provided labels.
inline GaussianState vacuum_state(std::vector<ModeLabel> labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    return GaussianState(Matrix::Identity(2 * n, 2 * n), std::move(labels));
}

/// Single thermal mode of quadrature variance v (v = 1 is vacuum).
inline GaussianState thermal_state(double v, ModeLabel label) {
    if (v < 1.0) {
        throw std::domain_error("thermal variance must satisfy v >= 1, got " + std::to_string(v));
    }
    return GaussianState(v * Matrix::Identity(2, 2), {label});
}

/// Two-mode squeezed vacuum of quadrature variance v:
/// diagonal blocks v*I, off-diagonal blocks sqrt(v^2-1)*diag(1,-1).
inline GaussianState tmsv(double v, ModeLabel mode_a, ModeLabel mode_b) {
    if (v < 1.0) {
        throw std::domain_error("TMSV variance must satisfy v >= 1, got " + std::to_string(v));
    }
    Matrix g = Matrix::Zero(4, 4);
    const double c = std::sqrt(v * v - 1.0);
    g(0, 0) = g(1, 1) = g(2, 2) = g(3, 3) = v;
    g(0, 2) = g(2, 0) = c;
    g(1, 3) = g(3, 1) = -c;
    return GaussianState(std::move(g), {mode_a, mode_b});
}

/// Block-diagonal concatenation of two states (product state).
inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    for (const auto& label : b.labels()) {
        if (a.has(label)) {
            throw std::invalid_argument("tensor: label collision on " + to_string(label));
        }
    }
    const int na = 2 * a.n_modes(), nb = 2 * b.n_modes();
    Matrix g = Matrix::Zero(na + nb, na + nb);
    g.topLeftCorner(na, na) = a.cov();
    g.bottomRightCorner(nb, nb) = b.cov();
    std::vector<ModeLabel> labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    return GaussianState(std::move(g), std::move(labels));
}

/// Restriction (partial trace) onto the selected modes, order preserved.
inline GaussianState restrict_to(const GaussianState& state, const std::vector<ModeLabel>& keep) {
    std::vector<int> idx;
    idx.reserve(keep.size());
    for (const auto& label : keep) idx.push_back(state.index_of(label));
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix g(2 * k, 2 * k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            g.block<2, 2>(2 * i, 2 * j) = state.cov().block<2, 2>(2 * idx[i], 2 * idx[j]);
        }
    }
    return GaussianState(std::move(g), keep);
}

/// Beamsplitter of transmittance t acting on two labeled modes:
/// out_a = sqrt(t) a + sqrt(1-t) b, out_b = -sqrt(1-t) a + sqrt(t) b.
/// t = 1 is the identity; t = 0 swaps the modes up to a sign on one arm.
inline GaussianState beamsplitter(const GaussianState& state, const ModeLabel& mode_a,
                                  const ModeLabel& mode_b, double transmittance) {
    if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
        throw std::invalid_argument("beamsplitter transmittance must lie in [0,1], got " +
                                    std::to_string(transmittance));
    }
    const int ia = state.index_of(mode_a), ib = state.index_of(mode_b);
    if (ia == ib) {
        throw std::invalid_argument("beamsplitter requires two distinct modes");
    }
    const double c = std::sqrt(transmittance), s = std::sqrt(1.0 - transmittance);
    Matrix g = state.cov();
    // Row update (two scalar row combinations per quadrature), then columns.
    for (int q = 0; q < 2; ++q) {
        const Eigen::Index ra = 2 * ia + q, rb = 2 * ib + q;
        const Eigen::RowVectorXd row_a = g.row(ra), row_b = g.row(rb);
        g.row(ra) = c * row_a + s * row_b;
        g.row(rb) = -s * row_a + c * row_b;
    }
    for (int q = 0; q < 2; ++q) {
        const Eigen::Index ca = 2 * ia + q, cb = 2 * ib + q;
        const Vector col_a = g.col(ca), col_b = g.col(cb);
        g.col(ca) = c * col_a + s * col_b;
        g.col(cb) = -s * col_a + c * col_b;
    }
    return GaussianState(std::move(g), state.labels());
}

/// Local pi rotation (x,p) -> (-x,-p) of one mode; flips the sign of all its
/// correlations with other modes. Used to normalize splitter-arm sign gauges.
inline GaussianState phase_flip(const GaussianState& state, const ModeLabel& mode) {
    const int i = state.index_of(mode);
    Matrix g = state.cov();
    g.row(2 * i) *= -1.0;
    g.row(2 * i + 1) *= -1.0;
    g.col(2 * i) *= -1.0;
    g.col(2 * i + 1) *= -1.0;
    return GaussianState(std::move(g), state.labels());
}

/// Rename a mode in place (used when a vacuum arm becomes a user mode).
inline GaussianState relabel(const GaussianState& state, const ModeLabel& from,
                             const ModeLabel& to) {
    const int i = state.index_of(from);
    std::vector<ModeLabel> labels = state.labels();
    labels[static_cast<std::size_t>(i)] = to;
    return GaussianState(state.cov(), std::move(labels));
}

/// Williamson spectrum: the n symplectic eigenvalues, descending.
/// Computed via the real symmetric route: with S = cov^(1/2), the matrix
/// -(S Omega S)^2 is symmetric positive semi-definite with the squared
/// symplectic eigenvalues, each doubly degenerate. Values within 1e-9 of 1
/// on either side are clamped to 1, so the entropy of a bona fide pure state
/// is exactly zero instead of carrying eigensolver round-off.
inline std::vector<double> symplectic_eigenvalues(const GaussianState& state) {
    const int n = state.n_modes();
    const Matrix& g = state.cov();
    if (!g.allFinite()) {
        throw std::invalid_argument("symplectic_eigenvalues: non-finite covariance");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("symplectic_eigenvalues: eigendecomposition failed");
    }
    Vector lam = es.eigenvalues().cwiseMax(0.0);
    const Matrix sqrt_g =
        es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    const Matrix m = sqrt_g * symplectic_form(n) * sqrt_g;
    const Matrix b = (m - m.transpose()) / 2.0;  // enforce antisymmetry
    Matrix k = -b * b;
    k = ((k + k.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es2(k);
    if (es2.info() != Eigen::Success) {
        throw std::runtime_error("symplectic_eigenvalues: spectrum extraction failed");
    }
    Vector sq = es2.eigenvalues().cwiseMax(0.0);
    std::vector<double> nu(static_cast<std::size_t>(n));
    // Eigenvalues arrive ascending and doubly degenerate: average each pair.
    for (int i = 0; i < n; ++i) {
        const double v = std::sqrt((sq(2 * i) + sq(2 * i + 1)) / 2.0);
        nu[static_cast<std::size_t>(n - 1 - i)] = std::abs(v - 1.0) <= 1e-9 ? 1.0 : v;
    }
    return nu;
}

/// Von Neumann entropy contribution of one symplectic eigenvalue, in bits.
inline double entropy_g(double x) {
    if (x <= 1.0) return 0.0;
    const double up = (x + 1.0) / 2.0, dn = (x - 1.0) / 2.0;
    double h = up * std::log2(up);
    if (dn > 0.0) h -= dn * std::log2(dn);
    return h;
}

/// Von Neumann entropy of the state in bits: sum of g over the spectrum.
inline double von_neumann_entropy(const GaussianState& state) {
    double h = 0.0;
    for (double nu : symplectic_eigenvalues(state)) h += entropy_g(nu);
    return h;
}

/// Physicality check: symmetric (by construction) and all symplectic
/// eigenvalues >= 1 - tol.
inline bool is_bona_fide(const GaussianState& state, double tol = 1e-9) {
    const auto nu = symplectic_eigenvalues(state);
    return nu.empty() || nu.back() >= 1.0 - tol;
}

namespace detail {

/// Remove mode `drop` from the label list.
inline std::vector<ModeLabel> erase_label(const std::vector<ModeLabel>& labels, int drop) {
    std::vector<ModeLabel> out;
    out.reserve(labels.size() - 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (static_cast<int>(i) != drop) out.push_back(labels[i]);
    }
    return out;
}

/// Covariance of all modes except `drop`.
inline Matrix erase_mode(const Matrix& g, int drop) {
    const Eigen::Index n = g.rows();
    Matrix out(n - 2, n - 2);
    const Eigen::Index a = 2 * drop, b = a + 2;
    out.topLeftCorner(a, a) = g.topLeftCorner(a, a);
    out.topRightCorner(a, n - b) = g.topRightCorner(a, n - b);
    out.bottomLeftCorner(n - b, a) = g.bottomLeftCorner(n - b, a);
    out.bottomRightCorner(n - b, n - b) = g.bottomRightCorner(n - b, n - b);
    return out;
}

/// Cross-covariance between all other modes and the two columns of `mode`.
inline Matrix cross_columns(const Matrix& g, int mode) {
    const Eigen::Index n = g.rows();
    Matrix out(n - 2, 2);
    const Eigen::Index a = 2 * mode, b = a + 2;
    out.topRows(a) = g.block(0, a, a, 2);
    out.bottomRows(n - b) = g.block(b, a, n - b, 2);
    return out;
}

}  // namespace detail

/// Conditional state after an ideal homodyne measurement of one quadrature of
/// `mode`. Gaussian measurements leave the conditional covariance independent
/// of the outcome; the measured mode is removed. Uses the Moore-Penrose
/// pseudo-inverse with cutoff 1e-12 relative to the largest variance.
inline GaussianState condition_on_homodyne(const GaussianState& state, const ModeLabel& mode,
                                           Arm quadrature) {
    if (quadrature == Arm::none) {
        throw std::invalid_argument("condition_on_homodyne: quadrature must be x or p");
    }
    const int m = state.index_of(mode);
    const Matrix& g = state.cov();
    const int q = 2 * m + (quadrature == Arm::x ? 0 : 1);
    const double v = g(q, q);
    Matrix rest = detail::erase_mode(g, m);
    const Matrix cross = detail::cross_columns(g, m);
    const Vector cvec = cross.col(quadrature == Arm::x ? 0 : 1);
    const double cutoff = 1e-12 * std::max(1.0, g.diagonal().maxCoeff());
    if (v > cutoff) {
        rest -= (cvec * cvec.transpose()) / v;
    }
    return GaussianState(std::move(rest), detail::erase_label(state.labels(), m));
}

/// Conditional state after an ideal heterodyne (double-homodyne) measurement
/// of `mode`: gamma' = gamma_rest - sigma (gamma_mode + I)^(-1) sigma^T.
inline GaussianState condition_on_heterodyne(const GaussianState& state, const ModeLabel& mode) {
    const int m = state.index_of(mode);
    const Matrix& g = state.cov();
    Eigen::Matrix2d gm = g.block<2, 2>(2 * m, 2 * m);
    gm += Eigen::Matrix2d::Identity();
    const Matrix cross = detail::cross_columns(g, m);
    Matrix rest = detail::erase_mode(g, m);
    rest -= cross * gm.inverse() * cross.transpose();
    return GaussianState(std::move(rest), detail::erase_label(state.labels(), m));
}

}  // namespace cvqpon

#endif  // CVQPON_GAUSSIAN_HPP
