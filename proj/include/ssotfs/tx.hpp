#pragma once

#include <map>
#include <vector>

#include "ssotfs/rng.hpp"
#include "ssotfs/types.hpp"

namespace ssotfs {

/// Symbol-wise precoder W = Delta^{-doppler_est} Pi^{-delay_est}
///                          Pi^{virtual_delay} Delta^{virtual_doppler}.
/// Stored as the four exponents; the MN x MN matrix form is never built.
/// W is unitary with exactly one nonzero per row/column.
struct PrecoderSpec {
    long delay_est = 0;
    double doppler_est = 0.0;
    int virtual_delay = 0;
    int virtual_doppler = 0;

    bool is_identity() const {
        return delay_est == 0 && doppler_est == 0.0 && virtual_delay == 0 &&
               virtual_doppler == 0;
    }
};

enum class AllocationPolicy { Equal, MaxminRadar };

/// Per-antenna transmit powers. sum(alpha) must not exceed the frame budget.
struct PowerAllocation {
    std::vector<double> alpha;

    static PowerAllocation zeros(int n_bs) { return {std::vector<double>(n_bs, 0.0)}; }
    double total() const;
    void validate(double alpha_total) const;
};

/// Radar-side estimates driving the precoder for one resolvable path.
struct PathEstimate {
    int antenna = 1; ///< transmit angular index (beam center), 1-based
    long delay_est = 0;
    double doppler_est = 0.0;
};

enum class VirtualIndexPolicy { Distinct, Zero, Random };

/// W v applied as four O(MN) shift/phase passes.
cvec apply_precoder(const PrecoderSpec& w, const cvec& v);

/// Assigns a PrecoderSpec to every antenna inside each path's beam window
/// (n_range antennas around the center carry a copy of the path's precoder).
/// The Distinct policy fixes virtual indices (p-1) mod M / (p-1) mod N; Random
/// draws distinct sets from the grid. Antennas absent from the map are
/// implicitly identity.
std::map<int, PrecoderSpec> build_precoder_set(const std::vector<PathEstimate>& paths,
                                               const FrameParams& p, int n_range,
                                               VirtualIndexPolicy policy,
                                               Rng* rng = nullptr);

/// S = Z F^H: unitary inverse DFT across the antenna dimension for each of the
/// MN rows. Input/output are stacked per-antenna segments of length mn.
cvec spatial_spread(const cvec& z_stacked, int mn, int n_bs);

/// Full transmit chain of the frame: OTFS modulate, precode and scale each
/// antenna, then spread. Returns the stacked TDS vector (length n_bs*mn).
cvec full_tx_chain(const cvec& x, const std::map<int, PrecoderSpec>& precoders,
                   const PowerAllocation& alloc, const FrameParams& p);

namespace serial {
cvec spatial_spread(const cvec& z_stacked, int mn, int n_bs);
} // namespace serial

namespace detail {
// Forward unitary DFT over the antenna partition; the de-spreading kernel.
cvec antenna_forward_dft(const cvec& stacked, int mn, int n_bs, bool parallel);
} // namespace detail

} // namespace ssotfs
