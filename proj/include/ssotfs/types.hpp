#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace ssotfs {

using cdouble = std::complex<double>;
using cvec = std::vector<cdouble>;

/// OTFS grid geometry, array size and power budget shared by the whole chain.
///
/// m delay bins by n Doppler bins, n_bs base-station antennas with
/// half-wavelength spacing. Delay resolution is 1/(m*delta_f), Doppler
/// resolution is 1/(n*slot_t).
struct FrameParams {
    int m = 32;
    int n = 16;
    int n_bs = 128;
    double delta_f = 15e3;
    double slot_t = 1.0 / 15e3;
    double alpha_total = 1.0;

    int mn() const { return m * n; }
    double delay_resolution() const { return 1.0 / (m * delta_f); }
    double doppler_resolution() const { return 1.0 / (n * slot_t); }

    void validate() const {
        if (m < 1 || n < 1 || n_bs < 1)
            throw std::invalid_argument("FrameParams: grid/antenna counts must be >= 1");
        if (delta_f <= 0.0 || slot_t <= 0.0)
            throw std::invalid_argument("FrameParams: delta_f and slot_t must be positive");
        if (alpha_total <= 0.0)
            throw std::invalid_argument("FrameParams: alpha_total must be positive");
    }
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

/// Infeasible or inconsistent experiment/scenario setup (as opposed to a bad
/// value passed to a single operation).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ssotfs
