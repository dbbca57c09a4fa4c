#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssotfs/types.hpp"

namespace ssotfs {

/// Transmit/receive angular indices of a departure angle. The angular
/// resolution is 2/n_bs in sin(phi); an angle is on-grid when sin(phi) is an
/// integer multiple of it, in which case spreading maps the path to exactly
/// one antenna pair (raw values land on integers).
struct AngularIndices {
    double raw_tx = 0.0; ///< unrounded mod(n_bs - sin*n_bs/2, n_bs) + 1
    double raw_rx = 0.0; ///< unrounded mod(n_bs + sin*n_bs/2, n_bs) + 1
    int a_tx = 1;        ///< rounded into 1..n_bs, ties toward the smaller index
    int a_rx = 1;
    bool on_grid = false;
};

/// Unit-norm transmit steering vector for AoD phi (half-wavelength spacing):
/// entry m = exp(j*pi*m*sin(phi)) / sqrt(n_bs). Requires |phi| <= pi/2.
cvec steering_vector(double phi, int n_bs);

AngularIndices angular_indices(double phi, int n_bs);

/// Principal-value AoA in [-pi/2, pi/2] whose receive angular index is a_rx.
double aoa_from_rx_index(int a_rx, int n_bs);

/// On-grid AoD whose transmit angular index is a_tx (inverse of the a_tx map).
double aod_from_tx_index(int a_tx, int n_bs);

/// Equivalent angular-domain channel vector h^A = a^T(phi) F^H diag(sqrt(alpha)).
/// At on-grid angles the single surviving entry is evaluated in closed form
/// (sqrt(alpha) at a_tx) to avoid the removable 0/0.
cvec angular_comm_vector(double phi, int n_bs, const std::vector<double>& alpha);

/// Equivalent angular-domain radar channel matrix
/// H^A = F a(phi) a^T(phi) F^H diag(sqrt(alpha)); on-grid it has the single
/// entry sqrt(alpha[a_tx]) at (a_rx, a_tx).
Eigen::MatrixXcd angular_radar_matrix(double phi, int n_bs, const std::vector<double>& alpha);

} // namespace ssotfs
