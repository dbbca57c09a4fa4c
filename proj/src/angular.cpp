#include "ssotfs/angular.hpp"

#include <algorithm>
#include <cmath>

namespace ssotfs {

namespace {

constexpr double kOnGridTol = 1e-9;

double positive_mod(double x, double n) {
    double r = std::fmod(x, n);
    if (r < 0.0) r += n;
    return r;
}

// Nearest integer, ties toward the smaller value, wrapped into 1..n_bs.
int round_index(double raw, int n_bs) {
    const long idx = static_cast<long>(std::ceil(raw - 0.5));
    long wrapped = (idx - 1) % n_bs;
    if (wrapped < 0) wrapped += n_bs;
    return static_cast<int>(wrapped) + 1;
}

void check_phi(double phi) {
    require(phi >= -M_PI / 2 - 1e-12 && phi <= M_PI / 2 + 1e-12,
            "AoD must lie in [-pi/2, pi/2]");
}

cdouble unit_phase(double ang) { return {std::cos(ang), std::sin(ang)}; }

} // namespace

cvec steering_vector(double phi, int n_bs) {
    check_phi(phi);
    require(n_bs >= 1, "steering_vector: n_bs must be >= 1");
    const double s = std::sin(phi);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_bs));
    cvec a(n_bs);
    for (int m = 0; m < n_bs; ++m) a[m] = scale * unit_phase(M_PI * m * s);
    return a;
}

AngularIndices angular_indices(double phi, int n_bs) {
    check_phi(phi);
    const double half = std::sin(phi) * n_bs / 2.0;
    AngularIndices out;
    out.raw_tx = positive_mod(n_bs - half, n_bs) + 1.0;
    out.raw_rx = positive_mod(n_bs + half, n_bs) + 1.0;
    out.a_tx = round_index(out.raw_tx, n_bs);
    out.a_rx = round_index(out.raw_rx, n_bs);
    out.on_grid = std::abs(half - std::round(half)) < kOnGridTol;
    return out;
}

double aoa_from_rx_index(int a_rx, int n_bs) {
    require(a_rx >= 1 && a_rx <= n_bs, "receive angular index out of range");
    const int j = (a_rx - 1 <= n_bs / 2) ? a_rx - 1 : a_rx - 1 - n_bs;
    const double s = std::clamp(2.0 * j / n_bs, -1.0, 1.0);
    return std::asin(s);
}

double aod_from_tx_index(int a_tx, int n_bs) {
    require(a_tx >= 1 && a_tx <= n_bs, "transmit angular index out of range");
    const int j = (a_tx - 1 <= n_bs / 2) ? -(a_tx - 1) : n_bs - (a_tx - 1);
    const double s = std::clamp(2.0 * j / n_bs, -1.0, 1.0);
    return std::asin(s);
}

cvec angular_comm_vector(double phi, int n_bs, const std::vector<double>& alpha) {
    check_phi(phi);
    require(static_cast<int>(alpha.size()) == n_bs, "alpha must have n_bs entries");
    const AngularIndices idx = angular_indices(phi, n_bs);
    cvec h(n_bs, cdouble{0.0, 0.0});
    if (idx.on_grid) {
        h[idx.a_tx - 1] = std::sqrt(alpha[idx.a_tx - 1]);
        return h;
    }
    const double s = std::sin(phi);
    const cdouble numer = 1.0 - unit_phase(M_PI * n_bs * s);
    for (int l = 1; l <= n_bs; ++l) {
        const cdouble denom = 1.0 - unit_phase(M_PI * s + 2.0 * M_PI * (l - 1) / n_bs);
        h[l - 1] = std::sqrt(alpha[l - 1]) / static_cast<double>(n_bs) * numer / denom;
    }
    return h;
}

Eigen::MatrixXcd angular_radar_matrix(double phi, int n_bs, const std::vector<double>& alpha) {
    check_phi(phi);
    require(static_cast<int>(alpha.size()) == n_bs, "alpha must have n_bs entries");
    const AngularIndices idx = angular_indices(phi, n_bs);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_bs, n_bs);
    if (idx.on_grid) {
        h(idx.a_rx - 1, idx.a_tx - 1) = std::sqrt(alpha[idx.a_tx - 1]);
        return h;
    }
    const double s = std::sin(phi);
    const cdouble numer = 1.0 - unit_phase(M_PI * n_bs * s);
    const double scale = 1.0 / (static_cast<double>(n_bs) * n_bs);
    std::vector<cdouble> rx_factor(n_bs), tx_factor(n_bs);
    for (int k = 1; k <= n_bs; ++k)
        rx_factor[k - 1] = numer / (1.0 - unit_phase(M_PI * s - 2.0 * M_PI * (k - 1) / n_bs));
    for (int l = 1; l <= n_bs; ++l)
        tx_factor[l - 1] = numer / (1.0 - unit_phase(M_PI * s + 2.0 * M_PI * (l - 1) / n_bs));
    for (int k = 0; k < n_bs; ++k)
        for (int l = 0; l < n_bs; ++l)
            h(k, l) = std::sqrt(alpha[l]) * scale * rx_factor[k] * tx_factor[l];
    return h;
}

} // namespace ssotfs
