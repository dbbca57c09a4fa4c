#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "ssotfs/comm.hpp"
#include "ssotfs/result.hpp"
#include "ssotfs/types.hpp"

namespace ssotfs {

/// Equivalent codeword matrix: column p is Xi_p x (MN x P).
Eigen::MatrixXcd codeword_matrix(const cvec& x, const std::vector<PathFactor>& factors,
                                 const FrameParams& p);

/// Gram matrix of the per-path error images and its power-weighted variant
/// diag(sqrt(alpha))^H Omega diag(sqrt(alpha)). Hermitian PSD; diagonal
/// entries all equal d_E^2(e) since the factors are unitary.
struct CodewordDiffMatrix {
    Eigen::MatrixXcd omega;
    Eigen::MatrixXcd weighted;
    double d_e_sq = 0.0;
};

CodewordDiffMatrix codeword_diff_matrix(const cvec& e, const std::vector<PathFactor>& factors,
                                        const std::vector<double>& alpha,
                                        const FrameParams& p);

/// h^H Omega~ h >= 0.
double conditional_distance(const Eigen::VectorXcd& h_eff, const Eigen::MatrixXcd& omega_tilde);

/// PEP upper bounds derived from the weighted codeword difference matrix.
/// The conditional pair needs the fading vector; the determinant-based bounds
/// need full rank (rank tolerance lambda_min/lambda_max > 1e-10).
struct PepBounds {
    std::vector<double> eigenvalues; ///< of the weighted matrix, descending
    int rank = 0;
    std::optional<double> conditional;     ///< exp(-h^H Omega~ h / (4 N0))
    std::optional<double> eigen_expanded;  ///< same bound via the eigenbasis
    double averaged_product = 1.0;         ///< prod 1/(1 + lambda_j / (4 N0 P))
    double averaged_high_snr = 0.0;        ///< (prod lambda_j)^{-1} (4 N0 P)^rank
    std::optional<double> full_rank_det;   ///< 1/det(Omega) * ((prod alpha)^{1/P}/(4 N0 P))^{-P}
    std::optional<double> final_bound;     ///< (d_E^2/P)^{-P} ((prod alpha)^{1/P}/(4 N0))^{-P}
};

PepBounds pep_bounds(const CodewordDiffMatrix& cdm, const std::vector<double>& alpha,
                     double noise_psd, const std::optional<Eigen::VectorXcd>& h_eff = {});

/// Gram determinant computed by the projection recursion
/// GD(u_1..u_j) = GD(u_1..u_{j-1}) * |u~_j|^2, u~_j the orthogonal complement
/// projection. Rank deficiency gives 0.
struct GramRecursion {
    double determinant = 1.0;
    std::vector<double> projection_norms_sq;
};

GramRecursion gram_det_recursive(const std::vector<cvec>& vectors);

/// det(Omega) <= (d_E^2)^P, with equality when Omega is diagonal.
struct DetBoundResult {
    double bound = 0.0;
    double det = 0.0;
    bool holds = false;
    double equality_gap = 0.0; ///< (bound - det) / bound
    bool diagonal = false;
};

DetBoundResult det_bound_check(const Eigen::MatrixXcd& omega, double d_e_sq, int p_paths);

/// Off-diagonal Gram entry e^H Xi_p^H Xi_p' e evaluated three ways: by the
/// operators, by the TD error-sequence sum, and (when applicable) by the
/// shared-delay closed form or the shared-Doppler approximation.
struct OffdiagDiagnostics {
    cdouble direct{0.0, 0.0};
    cdouble sum_form{0.0, 0.0};
    std::optional<cdouble> same_delay_form;
    std::optional<cdouble> same_doppler_approx;
    bool same_delay_agrees = false;
    double same_doppler_gap = 0.0;
};

OffdiagDiagnostics offdiag_diagnostics(const cvec& e, const PathFactor& p1,
                                       const PathFactor& p2, const FrameParams& p);

enum class DetChannelPolicy { Precoded, RandomIndices, DistinctDelayFractional };

struct DetEvalConfig {
    FrameParams frame;
    std::vector<int> p_values = {3, 4, 5};
    int l_max = 2;
    int k_max = 2;
    int draws = 1000;
    std::vector<int> pattern_repeats = {1, 2, 3, 4, 5, 6}; ///< d_E^2 = 8 * r
    double min_doppler_separation = 0.2;
    /// Random keeps the precoded mean above the non-precoded baseline across
    /// the whole d_E^2 range; the fixed (p-1, p-1) assignment interacts badly
    /// with the periodic error pattern at large d_E^2.
    VirtualIndexPolicy virtual_policy = VirtualIndexPolicy::Random;
    std::uint64_t seed = 1;
};

/// Mean det(Omega) over channel draws for the fixed [2, 0, -2] error pattern,
/// per precoding policy and path count, plus the (d_E^2)^P bound rows.
ResultTable avg_determinant_experiment(const DetEvalConfig& cfg);

/// The fixed error sequence: [2, 0, -2] repeated, zero-padded to mn.
cvec det_eval_error_pattern(int repeats, int mn);

} // namespace ssotfs
