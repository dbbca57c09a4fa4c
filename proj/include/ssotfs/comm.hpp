#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "ssotfs/channel.hpp"
#include "ssotfs/result.hpp"
#include "ssotfs/tx.hpp"
#include "ssotfs/types.hpp"

namespace ssotfs {

enum class Constellation { Bpsk, Qpsk };

const cvec& constellation_symbols(Constellation c);
int bits_per_symbol(Constellation c);
/// Symbol index for a bit group (MSB first); BPSK maps bit 0 -> +1.
int symbol_index(Constellation c, const std::uint8_t* bits);
void symbol_bits(Constellation c, int index, std::uint8_t* bits_out);

/// One per-path DD-domain factor: channel delay/Doppler around the per-antenna
/// precoder, conjugated by the OTFS transforms. The whole factor reduces to
/// scale * Pi^shift Delta^exponent in the TD domain.
struct PathFactor {
    long delay = 0;
    double doppler = 0.0;
    PrecoderSpec precoder; ///< identity when default-constructed

    struct Canonical {
        cdouble scale{1.0, 0.0};
        long shift = 0;
        double exponent = 0.0;
    };
    Canonical canonical(int mn) const;
};

/// y = Xi x for one factor, evaluated through the structured operators.
cvec apply_path_factor(const PathFactor& f, const cvec& x, const FrameParams& p);

struct EffectiveTap {
    PathFactor factor;
    cdouble weight{0.0, 0.0}; ///< sqrt(alpha) * h
};

/// Effective DD-domain channel H = sum_p weight_p Xi_p. With integer effective
/// Doppler exponents every Xi_p is a twisted permutation of the DD grid and the
/// channel has at most P entries per row/column; that sparse form drives the
/// message-passing detector.
class EffectiveDdChannel {
public:
    struct Entry {
        int col = 0;
        cdouble coeff{0.0, 0.0};
    };

    EffectiveDdChannel(std::vector<EffectiveTap> taps, const FrameParams& p);

    const FrameParams& frame() const { return frame_; }
    const std::vector<EffectiveTap>& taps() const { return taps_; }
    bool integer_only() const { return integer_only_; }

    cvec apply(const cvec& x) const;
    Eigen::MatrixXcd dense() const;

    /// Sparse rows (throws for fractional channels).
    const std::vector<std::vector<Entry>>& rows() const;

private:
    FrameParams frame_;
    std::vector<EffectiveTap> taps_;
    bool integer_only_ = false;
    std::vector<std::vector<Entry>> rows_;
};

/// Taps for one user of a sampled scenario under the given precoders/powers.
EffectiveDdChannel build_effective_dd_channel(const Scenario& sc, int user,
                                              const std::map<int, PrecoderSpec>& precoders,
                                              const PowerAllocation& alloc);

/// Exhaustive ML detection; requires MN * bits_per_symbol <= 20. Ties break
/// toward the lexicographically smaller codeword.
std::vector<int> ml_detect(const cvec& y, const Eigen::MatrixXcd& h, Constellation c);

struct MpResult {
    std::vector<int> symbols;
    std::vector<std::vector<double>> probs; ///< per symbol, sums to 1
    int iterations_run = 0;
};

/// Gaussian-approximation message passing over the sparse DD graph.
MpResult mp_detect(const cvec& y, const EffectiveDdChannel& ch, Constellation c,
                   double noise_psd, int max_iterations = 30, double damping = 0.6);

/// Terminated rate-1/2 convolutional code, generators 7/5 (octal), memory 2.
/// Encoding appends the two flush bits; output has 2*(len+2) bits.
std::vector<std::uint8_t> conv75_encode(const std::vector<std::uint8_t>& bits);

/// Soft Viterbi decode over LLRs (positive favors bit 0); input length must be
/// even and cover at least the two flush stages.
std::vector<std::uint8_t> viterbi75_decode(const std::vector<double>& llrs);

struct FerConfig {
    FrameParams frame;       // n_bs unused by the effective-channel simulation
    int paths = 8;
    int l_max = 10;
    int k_max = 6;
    bool fractional_doppler = false;
    Constellation constellation = Constellation::Bpsk;
    bool coded = true;
    bool precoded = true;
    VirtualIndexPolicy virtual_policy = VirtualIndexPolicy::Random;
    AllocationPolicy allocation = AllocationPolicy::Equal;
    std::vector<double> snr_db; ///< average symbol SNR Es/N0 in dB
    int frames_per_point = 1000;
    int mp_iterations = 30;
    double mp_damping = 0.6;
    std::uint64_t seed = 1;
};

/// FER vs average symbol SNR over the effective DD channel of one user. A
/// frame error is any decoded-bit mismatch (coded) or any symbol mismatch
/// (uncoded).
ResultTable fer_experiment(const FerConfig& cfg);

} // namespace ssotfs
