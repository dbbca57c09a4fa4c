#include "ssotfs/comm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ssotfs/otfs.hpp"

namespace ssotfs {

const cvec& constellation_symbols(Constellation c) {
    static const cvec bpsk = {cdouble{1.0, 0.0}, cdouble{-1.0, 0.0}};
    static const double r = 1.0 / std::sqrt(2.0);
    static const cvec qpsk = {cdouble{r, r}, cdouble{r, -r}, cdouble{-r, r},
                              cdouble{-r, -r}};
    return c == Constellation::Bpsk ? bpsk : qpsk;
}

int bits_per_symbol(Constellation c) { return c == Constellation::Bpsk ? 1 : 2; }

int symbol_index(Constellation c, const std::uint8_t* bits) {
    int idx = 0;
    for (int b = 0; b < bits_per_symbol(c); ++b) idx = (idx << 1) | (bits[b] & 1);
    return idx;
}

void symbol_bits(Constellation c, int index, std::uint8_t* bits_out) {
    const int bps = bits_per_symbol(c);
    for (int b = 0; b < bps; ++b)
        bits_out[b] = static_cast<std::uint8_t>((index >> (bps - 1 - b)) & 1);
}

PathFactor::Canonical PathFactor::canonical(int mn) const {
    // Pi^l Delta^nu Delta^{-nu^} Pi^{-l^} Pi^{l.} Delta^{k.}
    //   = gamma^{(nu-nu^)(l.-l^)} Pi^{l+l.-l^} Delta^{k.+nu-nu^}
    Canonical c;
    const double dnu = doppler - precoder.doppler_est;
    const double ang = 2.0 * M_PI * dnu *
                       static_cast<double>(precoder.virtual_delay - precoder.delay_est) / mn;
    c.scale = {std::cos(ang), std::sin(ang)};
    c.shift = delay + precoder.virtual_delay - precoder.delay_est;
    c.exponent = precoder.virtual_doppler + dnu;
    return c;
}

cvec apply_path_factor(const PathFactor& f, const cvec& x, const FrameParams& p) {
    cvec v = dd_to_td(x, p);
    if (!f.precoder.is_identity()) v = apply_precoder(f.precoder, v);
    v = doppler_ramp(v, f.doppler);
    v = cyclic_shift(v, f.delay);
    return td_to_dd(v, p);
}

namespace {

constexpr double kIntegerTol = 1e-12;

bool near_integer(double v) { return std::abs(v - std::round(v)) < kIntegerTol; }

} // namespace

EffectiveDdChannel::EffectiveDdChannel(std::vector<EffectiveTap> taps, const FrameParams& p)
    : frame_(p), taps_(std::move(taps)) {
    frame_.validate();
    integer_only_ = true;
    for (const auto& tap : taps_)
        if (!near_integer(tap.factor.canonical(frame_.mn()).exponent)) integer_only_ = false;

    if (!integer_only_) return;

    // Twisted-permutation form of each tap: output (m, kap) couples to input
    // ((m - L) mod M, (kap - V) mod N) with a per-entry unit phase.
    const int m_bins = frame_.m;
    const int n_bins = frame_.n;
    const int mn = frame_.mn();
    rows_.assign(mn, {});
    for (const auto& tap : taps_) {
        const auto c = tap.factor.canonical(mn);
        const long v_int = std::lround(c.exponent);
        long shift = c.shift % mn;
        if (shift < 0) shift += mn;
        for (int m = 0; m < m_bins; ++m) {
            const long diff = m - shift;
            long m_in = diff % m_bins;
            if (m_in < 0) m_in += m_bins;
            const long wraps = (m_in - diff) / m_bins;
            const double base_ang = 2.0 * M_PI * static_cast<double>(v_int) * m_in / mn;
            for (int kap = 0; kap < n_bins; ++kap) {
                long k_in = (kap - v_int) % n_bins;
                if (k_in < 0) k_in += n_bins;
                const double ang =
                    base_ang - 2.0 * M_PI * static_cast<double>(wraps) * kap / n_bins;
                const cdouble coeff =
                    tap.weight * c.scale * cdouble{std::cos(ang), std::sin(ang)};
                const int row = m + m_bins * kap;
                const int col = static_cast<int>(m_in + m_bins * k_in);
                auto& entries = rows_[row];
                auto it = std::find_if(entries.begin(), entries.end(),
                                       [col](const Entry& e) { return e.col == col; });
                if (it == entries.end())
                    entries.push_back({col, coeff});
                else
                    it->coeff += coeff;
            }
        }
    }
}

cvec EffectiveDdChannel::apply(const cvec& x) const {
    const int mn = frame_.mn();
    require(static_cast<int>(x.size()) == mn, "EffectiveDdChannel: input length must be M*N");
    // shared OTFS transforms; per-tap work happens in the TD domain
    const cvec v = dd_to_td(x, frame_);
    cvec acc(mn, cdouble{0.0, 0.0});
    for (const auto& tap : taps_) {
        const auto c = tap.factor.canonical(mn);
        cvec w = doppler_ramp(v, c.exponent);
        w = cyclic_shift(w, c.shift);
        const cdouble g = tap.weight * c.scale;
        for (int t = 0; t < mn; ++t) acc[t] += g * w[t];
    }
    return td_to_dd(acc, frame_);
}

Eigen::MatrixXcd EffectiveDdChannel::dense() const {
    const int mn = frame_.mn();
    Eigen::MatrixXcd h(mn, mn);
    cvec e(mn, cdouble{0.0, 0.0});
    for (int c = 0; c < mn; ++c) {
        e[c] = 1.0;
        const cvec col = apply(e);
        for (int r = 0; r < mn; ++r) h(r, c) = col[r];
        e[c] = 0.0;
    }
    return h;
}

const std::vector<std::vector<EffectiveDdChannel::Entry>>& EffectiveDdChannel::rows() const {
    require(integer_only_, "sparse form needs an integer-only effective channel");
    return rows_;
}

EffectiveDdChannel build_effective_dd_channel(const Scenario& sc, int user,
                                              const std::map<int, PrecoderSpec>& precoders,
                                              const PowerAllocation& alloc) {
    require(user >= 0 && user < sc.n_users, "build_effective_dd_channel: unknown user");
    require(static_cast<int>(alloc.alpha.size()) == sc.frame.n_bs,
            "build_effective_dd_channel: allocation length must be n_bs");
    std::vector<EffectiveTap> taps;
    taps.reserve(sc.paths_per_user);
    for (int p = 0; p < sc.paths_per_user; ++p) {
        const ScenarioPath& sp = sc.path(user, p);
        EffectiveTap tap;
        tap.factor.delay = sp.comm.delay;
        tap.factor.doppler = sp.comm.doppler_total();
        auto it = precoders.find(sp.ang.a_tx);
        if (it != precoders.end()) tap.factor.precoder = it->second;
        tap.weight = std::sqrt(alloc.alpha[sp.ang.a_tx - 1]) * sp.comm.gain;
        taps.push_back(tap);
    }
    return EffectiveDdChannel(std::move(taps), sc.frame);
}

std::vector<int> ml_detect(const cvec& y, const Eigen::MatrixXcd& h, Constellation c) {
    const int mn = static_cast<int>(h.cols());
    require(static_cast<int>(y.size()) == mn, "ml_detect: length mismatch");
    const int bps = bits_per_symbol(c);
    if (mn * bps > 20) throw ConfigError("ml_detect: search space exceeds 2^20");

    const cvec& syms = constellation_symbols(c);
    const int q = static_cast<int>(syms.size());
    std::vector<int> idx(mn, 0), best(mn, 0);
    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd x(mn);

    const long total = static_cast<long>(std::pow(static_cast<double>(q), mn) + 0.5);
    for (long cw = 0; cw < total; ++cw) {
        long rem = cw;
        for (int t = mn - 1; t >= 0; --t) {
            idx[t] = static_cast<int>(rem % q);
            rem /= q;
        }
        for (int t = 0; t < mn; ++t) x(t) = syms[idx[t]];
        double cost = 0.0;
        for (int r = 0; r < mn; ++r) {
            cdouble acc = -y[r];
            for (int t = 0; t < mn; ++t) acc += h(r, t) * x(t);
            cost += std::norm(acc);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = idx;
        }
    }
    return best;
}

MpResult mp_detect(const cvec& y, const EffectiveDdChannel& ch, Constellation c,
                   double noise_psd, int max_iterations, double damping) {
    const auto& rows = ch.rows(); // throws on fractional channels
    const int mn = ch.frame().mn();
    require(static_cast<int>(y.size()) == mn, "mp_detect: length mismatch");
    require(max_iterations >= 1, "mp_detect: need at least one iteration");
    require(damping > 0.0 && damping <= 1.0, "mp_detect: damping in (0, 1]");

    const cvec& syms = constellation_symbols(c);
    const int q = static_cast<int>(syms.size());
    const double var_floor = 1e-12;
    const double n0 = std::max(noise_psd, var_floor);

    // flat edge layout: edges ordered row-major, messages addressed by edge id
    std::vector<int> row_off(mn + 1, 0);
    for (int r = 0; r < mn; ++r)
        row_off[r + 1] = row_off[r] + static_cast<int>(rows[r].size());
    const int n_edges = row_off[mn];
    std::vector<cdouble> edge_coeff(n_edges);
    std::vector<int> edge_col(n_edges);
    for (int r = 0; r < mn; ++r)
        for (int s = 0; s < static_cast<int>(rows[r].size()); ++s) {
            edge_coeff[row_off[r] + s] = rows[r][s].coeff;
            edge_col[row_off[r] + s] = rows[r][s].col;
        }
    // column adjacency: (row, edge id)
    std::vector<int> col_off(mn + 1, 0);
    for (int e = 0; e < n_edges; ++e) ++col_off[edge_col[e] + 1];
    for (int cidx = 0; cidx < mn; ++cidx) col_off[cidx + 1] += col_off[cidx];
    std::vector<int> col_row(n_edges), col_edge(n_edges);
    {
        std::vector<int> cursor(col_off.begin(), col_off.end() - 1);
        for (int r = 0; r < mn; ++r)
            for (int e = row_off[r]; e < row_off[r + 1]; ++e) {
                const int at = cursor[edge_col[e]]++;
                col_row[at] = r;
                col_edge[at] = e;
            }
    }

    std::vector<double> p(static_cast<std::size_t>(n_edges) * q, 1.0 / q);
    std::vector<cdouble> edge_mean(n_edges);
    std::vector<double> edge_var(n_edges);
    std::vector<cdouble> row_mean(mn);
    std::vector<double> row_var(mn);
    std::vector<std::vector<double>> beliefs(mn, std::vector<double>(q, 1.0 / q));
    std::vector<int> hard(mn, 0), prev_hard(mn, -1);
    std::vector<double> term(static_cast<std::size_t>(n_edges) * q);
    std::vector<double> total(q), ext(q);
    int iterations = 0;

    for (int iter = 0; iter < max_iterations; ++iter) {
        iterations = iter + 1;
        // observation side: interference mean/variance per row
        for (int r = 0; r < mn; ++r) {
            cdouble mean{0.0, 0.0};
            double var = n0;
            for (int e = row_off[r]; e < row_off[r + 1]; ++e) {
                cdouble ex{0.0, 0.0};
                double ex2 = 0.0;
                for (int a = 0; a < q; ++a) {
                    ex += p[static_cast<std::size_t>(e) * q + a] * syms[a];
                    ex2 += p[static_cast<std::size_t>(e) * q + a] * std::norm(syms[a]);
                }
                edge_mean[e] = edge_coeff[e] * ex;
                edge_var[e] = std::norm(edge_coeff[e]) * (ex2 - std::norm(ex));
                mean += edge_mean[e];
                var += edge_var[e];
            }
            row_mean[r] = mean;
            row_var[r] = var;
        }

        // symbol side: per-row likelihood terms, then damped extrinsics
        for (int col = 0; col < mn; ++col) {
            const int deg = col_off[col + 1] - col_off[col];
            if (deg == 0) continue;
            std::fill(total.begin(), total.end(), 0.0);
            for (int i = col_off[col]; i < col_off[col + 1]; ++i) {
                const int r = col_row[i];
                const int e = col_edge[i];
                const cdouble mu = row_mean[r] - edge_mean[e];
                const double var = std::max(row_var[r] - edge_var[e], var_floor);
                for (int a = 0; a < q; ++a) {
                    const double t =
                        -std::norm(y[r] - mu - edge_coeff[e] * syms[a]) / var;
                    term[static_cast<std::size_t>(e) * q + a] = t;
                    total[a] += t;
                }
            }
            double mx = total[0];
            for (int a = 1; a < q; ++a) mx = std::max(mx, total[a]);
            double z = 0.0;
            for (int a = 0; a < q; ++a) {
                beliefs[col][a] = std::exp(total[a] - mx);
                z += beliefs[col][a];
            }
            for (int a = 0; a < q; ++a) beliefs[col][a] /= z;
            for (int i = col_off[col]; i < col_off[col + 1]; ++i) {
                const int e = col_edge[i];
                double emx = -std::numeric_limits<double>::infinity();
                for (int a = 0; a < q; ++a) {
                    ext[a] = total[a] - term[static_cast<std::size_t>(e) * q + a];
                    emx = std::max(emx, ext[a]);
                }
                double ez = 0.0;
                for (int a = 0; a < q; ++a) {
                    ext[a] = std::exp(ext[a] - emx);
                    ez += ext[a];
                }
                for (int a = 0; a < q; ++a)
                    p[static_cast<std::size_t>(e) * q + a] =
                        damping * (ext[a] / ez) +
                        (1.0 - damping) * p[static_cast<std::size_t>(e) * q + a];
            }
        }

        for (int col = 0; col < mn; ++col) {
            int arg = 0;
            for (int a = 1; a < q; ++a)
                if (beliefs[col][a] > beliefs[col][arg]) arg = a;
            hard[col] = arg;
        }
        if (hard == prev_hard) break;
        prev_hard = hard;
    }

    return {std::move(hard), std::move(beliefs), iterations};
}

std::vector<std::uint8_t> conv75_encode(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint8_t> out;
    out.reserve(2 * (bits.size() + 2));
    int s1 = 0, s2 = 0;
    auto push = [&](int b) {
        out.push_back(static_cast<std::uint8_t>(b ^ s1 ^ s2)); // generator 111
        out.push_back(static_cast<std::uint8_t>(b ^ s2));      // generator 101
        s2 = s1;
        s1 = b;
    };
    for (std::uint8_t b : bits) push(b & 1);
    push(0);
    push(0);
    return out;
}

std::vector<std::uint8_t> viterbi75_decode(const std::vector<double>& llrs) {
    require(llrs.size() % 2 == 0, "viterbi75_decode: LLR count must be even");
    const int stages = static_cast<int>(llrs.size() / 2);
    require(stages >= 2, "viterbi75_decode: input shorter than the flush stages");

    // state = (b_{t-1} << 1) | b_{t-2}
    auto outputs = [](int state, int b) {
        const int s1 = (state >> 1) & 1, s2 = state & 1;
        return std::pair<int, int>{b ^ s1 ^ s2, b ^ s2};
    };
    auto next_state = [](int state, int b) { return ((b << 1) | (state >> 1)) & 3; };

    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> metric(4, neg_inf), next(4);
    metric[0] = 0.0;
    std::vector<std::array<std::uint8_t, 4>> trace(stages);

    for (int t = 0; t < stages; ++t) {
        const double l0 = llrs[2 * t], l1 = llrs[2 * t + 1];
        std::fill(next.begin(), next.end(), neg_inf);
        std::array<std::uint8_t, 4> from{};
        for (int state = 0; state < 4; ++state) {
            if (metric[state] == neg_inf) continue;
            for (int b = 0; b < 2; ++b) {
                const auto [o1, o2] = outputs(state, b);
                const double m = metric[state] + (o1 ? -l0 : l0) * 0.5 +
                                 (o2 ? -l1 : l1) * 0.5;
                const int ns = next_state(state, b);
                if (m > next[ns]) {
                    next[ns] = m;
                    from[ns] = static_cast<std::uint8_t>(state);
                }
            }
        }
        trace[t] = from;
        metric = next;
    }

    // terminated trellis ends in state 0
    std::vector<std::uint8_t> decoded(stages);
    int state = 0;
    for (int t = stages - 1; t >= 0; --t) {
        decoded[t] = static_cast<std::uint8_t>((state >> 1) & 1);
        state = trace[t][state];
    }
    decoded.resize(stages - 2); // drop flush bits
    return decoded;
}

namespace {

// Channel, power and precoder draws for one frame; draw order is fixed so
// equal/max-min runs with the same seed share realizations.
std::vector<EffectiveTap> draw_fer_taps(const FerConfig& cfg, Rng& rng) {
    const int p_count = cfg.paths;
    std::vector<long> delays(p_count);
    std::vector<double> dopplers(p_count);
    std::vector<cdouble> gains(p_count);
    std::vector<double> h_sq(p_count);
    for (int p = 0; p < p_count; ++p) {
        delays[p] = rng.uniform_int(0, std::min(cfg.l_max, cfg.frame.m - 1));
        const int k = rng.uniform_int(0, std::min(cfg.k_max, cfg.frame.n - 1));
        const double kappa = cfg.fractional_doppler ? rng.uniform(-0.5, 0.5) : 0.0;
        dopplers[p] = k + kappa;
        gains[p] = rng.cgaussian(1.0 / p_count);
        h_sq[p] = std::norm(rng.cgaussian(1.0));
    }

    std::vector<double> alpha(p_count, 1.0);
    if (cfg.allocation == AllocationPolicy::MaxminRadar) {
        double inv_sum = 0.0;
        for (double h : h_sq) inv_sum += 1.0 / std::max(h, 1e-12);
        for (int p = 0; p < p_count; ++p)
            alpha[p] = (1.0 / std::max(h_sq[p], 1e-12)) / inv_sum * p_count;
    }

    // virtual indices are drawn whether or not precoding is on, so runs that
    // differ only in the precoding flag share channel, payload and noise draws
    std::vector<int> vdelay(p_count, 0), vdoppler(p_count, 0);
    switch (cfg.virtual_policy) {
        case VirtualIndexPolicy::Zero:
            break;
        case VirtualIndexPolicy::Distinct:
            for (int p = 0; p < p_count; ++p) {
                vdelay[p] = p % cfg.frame.m;
                vdoppler[p] = p % cfg.frame.n;
            }
            break;
        case VirtualIndexPolicy::Random:
            rng.sample_distinct(cfg.frame.m, p_count, vdelay.begin());
            rng.sample_distinct(cfg.frame.n, p_count, vdoppler.begin());
            break;
    }

    std::vector<EffectiveTap> taps(p_count);
    for (int p = 0; p < p_count; ++p) {
        taps[p].factor.delay = delays[p];
        taps[p].factor.doppler = dopplers[p];
        if (cfg.precoded)
            taps[p].factor.precoder = {delays[p], dopplers[p], vdelay[p], vdoppler[p]};
        taps[p].weight = std::sqrt(alpha[p]) * gains[p];
    }
    return taps;
}

double llr_clip(double v) { return std::clamp(v, -30.0, 30.0); }

} // namespace

ResultTable fer_experiment(const FerConfig& cfg) {
    cfg.frame.validate();
    const int mn = cfg.frame.mn();
    if (cfg.frames_per_point <= 0) throw ConfigError("frames_per_point must be positive");
    if (cfg.snr_db.empty()) throw ConfigError("SNR grid is empty");
    if (cfg.fractional_doppler && !cfg.precoded)
        throw ConfigError("fractional Doppler without precoding leaves no sparse channel "
                          "for message passing");
    if (cfg.precoded && cfg.paths > std::min(cfg.frame.m, cfg.frame.n) &&
        cfg.virtual_policy != VirtualIndexPolicy::Zero)
        throw ConfigError("distinct virtual indices infeasible: paths > min(M, N)");
    const int bps = bits_per_symbol(cfg.constellation);
    const int coded_bits = mn * bps;
    if (cfg.coded && (coded_bits % 2 != 0 || coded_bits / 2 < 3))
        throw ConfigError("coded frame needs an even bit count covering the flush stages");

    ResultTable table;
    table.metadata.emplace_back("experiment", "fer");
    table.metadata.emplace_back("x_axis", "symbol_snr_es_n0_db");
    if (cfg.coded) {
        // bit SNR for the rate-1/2 code: Eb/N0 = Es/N0 - 10 log10(rate * bits/sym)
        char off[32];
        std::snprintf(off, sizeof(off), "%.4f",
                      -10.0 * std::log10(0.5 * bits_per_symbol(cfg.constellation)));
        table.metadata.emplace_back("bit_snr_offset_db", off);
    }
    for (std::size_t point = 0; point < cfg.snr_db.size(); ++point) {
        // average symbol SNR Es/N0 with beta = sum(alpha)/P = 1
        const double n0 = std::pow(10.0, -cfg.snr_db[point] / 10.0);
        std::vector<std::uint8_t> errs(cfg.frames_per_point, 0);

#pragma omp parallel for schedule(dynamic, 4)
        for (int trial = 0; trial < cfg.frames_per_point; ++trial) {
            Rng rng = Rng::stream(cfg.seed, point, trial);
            EffectiveDdChannel ch(draw_fer_taps(cfg, rng), cfg.frame);

            std::vector<std::uint8_t> payload, coded;
            std::vector<int> tx(mn);
            if (cfg.coded) {
                payload.resize(coded_bits / 2 - 2);
                for (auto& b : payload) b = rng.uniform() < 0.5 ? 0 : 1;
                coded = conv75_encode(payload);
                for (int t = 0; t < mn; ++t)
                    tx[t] = symbol_index(cfg.constellation, coded.data() + t * bps);
            } else {
                for (int t = 0; t < mn; ++t)
                    tx[t] = rng.uniform_int(0, (1 << bps) - 1);
            }

            const cvec& syms = constellation_symbols(cfg.constellation);
            cvec x(mn);
            for (int t = 0; t < mn; ++t) x[t] = syms[tx[t]];
            cvec y = ch.apply(x);
            for (auto& s : y) s += rng.cgaussian(n0);

            const MpResult det = mp_detect(y, ch, cfg.constellation, n0,
                                           cfg.mp_iterations, cfg.mp_damping);
            bool error = false;
            if (cfg.coded) {
                std::vector<double> llrs(coded_bits);
                for (int t = 0; t < mn; ++t) {
                    for (int b = 0; b < bps; ++b) {
                        double p0 = 0.0, p1 = 0.0;
                        for (std::size_t a = 0; a < syms.size(); ++a) {
                            std::uint8_t bits[2];
                            symbol_bits(cfg.constellation, static_cast<int>(a), bits);
                            (bits[b] ? p1 : p0) += det.probs[t][a];
                        }
                        llrs[t * bps + b] =
                            llr_clip(std::log(std::max(p0, 1e-300) / std::max(p1, 1e-300)));
                    }
                }
                error = viterbi75_decode(llrs) != payload;
            } else {
                error = det.symbols != tx;
            }
            errs[trial] = error ? 1 : 0;
        }

        long n_err = 0;
        for (std::uint8_t e : errs) n_err += e;
        ResultRow row;
        row.series = "fer";
        row.x = cfg.snr_db[point];
        row.metric = static_cast<double>(n_err) / cfg.frames_per_point;
        row.n_trials = cfg.frames_per_point;
        row.ci_half_width = wilson_half_width(n_err, cfg.frames_per_point);
        table.rows.push_back(row);
    }
    return table;
}

} // namespace ssotfs
