#include "ssotfs/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ssotfs/otfs.hpp"
#include "ssotfs/rng.hpp"

namespace ssotfs {

Eigen::MatrixXcd codeword_matrix(const cvec& x, const std::vector<PathFactor>& factors,
                                 const FrameParams& p) {
    require(!factors.empty(), "codeword_matrix: need at least one path");
    const int mn = p.mn();
    require(static_cast<int>(x.size()) == mn, "codeword_matrix: x length must be M*N");
    Eigen::MatrixXcd phi(mn, factors.size());
    for (std::size_t col = 0; col < factors.size(); ++col) {
        const cvec u = apply_path_factor(factors[col], x, p);
        for (int r = 0; r < mn; ++r) phi(r, col) = u[r];
    }
    return phi;
}

CodewordDiffMatrix codeword_diff_matrix(const cvec& e, const std::vector<PathFactor>& factors,
                                        const std::vector<double>& alpha,
                                        const FrameParams& p) {
    require(alpha.size() == factors.size(),
            "codeword_diff_matrix: one power per path expected");
    const Eigen::MatrixXcd phi = codeword_matrix(e, factors, p);
    CodewordDiffMatrix out;
    out.omega = phi.adjoint() * phi;
    out.omega = 0.5 * (out.omega + out.omega.adjoint().eval()); // exact Hermitian symmetry
    const int n_paths = static_cast<int>(factors.size());
    out.weighted.resize(n_paths, n_paths);
    for (int i = 0; i < n_paths; ++i)
        for (int j = 0; j < n_paths; ++j)
            out.weighted(i, j) = std::sqrt(alpha[i] * alpha[j]) * out.omega(i, j);
    double d = 0.0;
    for (const cdouble& v : e) d += std::norm(v);
    out.d_e_sq = d;
    return out;
}

double conditional_distance(const Eigen::VectorXcd& h_eff, const Eigen::MatrixXcd& omega_tilde) {
    require(h_eff.size() == omega_tilde.rows(), "conditional_distance: dimension mismatch");
    const cdouble q = (h_eff.adjoint() * omega_tilde * h_eff)(0, 0);
    return std::max(q.real(), 0.0);
}

PepBounds pep_bounds(const CodewordDiffMatrix& cdm, const std::vector<double>& alpha,
                     double noise_psd, const std::optional<Eigen::VectorXcd>& h_eff) {
    require(noise_psd > 0.0, "pep_bounds: noise PSD must be positive");
    const int n_paths = static_cast<int>(cdm.omega.rows());
    require(static_cast<int>(alpha.size()) == n_paths, "pep_bounds: one power per path");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cdm.weighted);
    std::vector<double> lambda(es.eigenvalues().data(),
                               es.eigenvalues().data() + n_paths);
    std::reverse(lambda.begin(), lambda.end());
    const double lmax = lambda.empty() ? 0.0 : std::max(lambda.front(), 0.0);
    if (!lambda.empty() && lambda.back() < -1e-10 * std::max(lmax, 1.0))
        throw std::invalid_argument("pep_bounds: matrix is not positive semidefinite");
    for (double& l : lambda) l = std::max(l, 0.0);

    PepBounds out;
    out.eigenvalues = lambda;
    out.rank = 0;
    for (double l : lambda)
        if (lmax > 0.0 && l / lmax > 1e-10) ++out.rank;

    const double denom = 4.0 * noise_psd * n_paths;
    out.averaged_product = 1.0;
    double lambda_prod = 1.0;
    for (int j = 0; j < out.rank; ++j) {
        out.averaged_product /= 1.0 + lambda[j] / denom;
        lambda_prod *= lambda[j];
    }
    out.averaged_high_snr = out.rank == 0
                                ? 1.0
                                : std::pow(denom, out.rank) / lambda_prod;

    if (out.rank == n_paths && n_paths > 0) {
        double alpha_prod = 1.0;
        for (double a : alpha) alpha_prod *= a;
        const double det_omega = cdm.omega.determinant().real();
        const double geo = std::pow(alpha_prod, 1.0 / n_paths);
        out.full_rank_det = 1.0 / det_omega * std::pow(geo / denom, -n_paths);
        out.final_bound = std::pow(cdm.d_e_sq / n_paths, -n_paths) *
                          std::pow(geo / (4.0 * noise_psd), -n_paths);
    }

    if (h_eff) {
        const double d2 = conditional_distance(*h_eff, cdm.weighted);
        out.conditional = std::exp(-d2 / (4.0 * noise_psd));
        const Eigen::VectorXcd hbar = es.eigenvectors().adjoint() * (*h_eff);
        double acc = 0.0;
        for (int j = 0; j < n_paths; ++j)
            acc += std::max(es.eigenvalues()(j), 0.0) * std::norm(hbar(j));
        out.eigen_expanded = std::exp(-acc / (4.0 * noise_psd));
    }
    return out;
}

GramRecursion gram_det_recursive(const std::vector<cvec>& vectors) {
    GramRecursion out;
    if (vectors.empty()) return out;
    const std::size_t dim = vectors.front().size();
    std::vector<cvec> basis; // orthonormal
    for (const cvec& u : vectors) {
        require(u.size() == dim, "gram_det_recursive: vectors must share a length");
        cvec w = u;
        // two MGS passes for orthogonality at the 1e-9 level
        for (int pass = 0; pass < 2; ++pass) {
            for (const cvec& b : basis) {
                cdouble proj{0.0, 0.0};
                for (std::size_t t = 0; t < dim; ++t) proj += std::conj(b[t]) * w[t];
                for (std::size_t t = 0; t < dim; ++t) w[t] -= proj * b[t];
            }
        }
        double norm_sq = 0.0;
        for (const cdouble& v : w) norm_sq += std::norm(v);
        out.projection_norms_sq.push_back(norm_sq);
        out.determinant *= norm_sq;
        double u_norm_sq = 0.0;
        for (const cdouble& v : u) u_norm_sq += std::norm(v);
        if (norm_sq > 1e-28 * std::max(u_norm_sq, 1.0)) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (cdouble& v : w) v *= inv;
            basis.push_back(std::move(w));
        }
    }
    return out;
}

DetBoundResult det_bound_check(const Eigen::MatrixXcd& omega, double d_e_sq, int p_paths) {
    require(omega.rows() == omega.cols() && omega.rows() == p_paths,
            "det_bound_check: omega must be P x P");
    DetBoundResult out;
    out.bound = std::pow(d_e_sq, p_paths);
    out.det = omega.determinant().real();
    out.holds = out.det <= out.bound + 1e-6 * out.bound;
    out.equality_gap = out.bound > 0.0 ? (out.bound - out.det) / out.bound : 0.0;
    double max_off = 0.0;
    for (int i = 0; i < p_paths; ++i)
        for (int j = 0; j < p_paths; ++j)
            if (i != j) max_off = std::max(max_off, std::abs(omega(i, j)));
    out.diagonal = max_off < 1e-9 * std::max(d_e_sq, 1e-300);
    return out;
}

OffdiagDiagnostics offdiag_diagnostics(const cvec& e, const PathFactor& p1,
                                       const PathFactor& p2, const FrameParams& p) {
    const int mn = p.mn();
    require(static_cast<int>(e.size()) == mn, "offdiag_diagnostics: e length must be M*N");
    OffdiagDiagnostics out;

    const cvec u1 = apply_path_factor(p1, e, p);
    const cvec u2 = apply_path_factor(p2, e, p);
    cdouble direct{0.0, 0.0};
    for (int t = 0; t < mn; ++t) direct += std::conj(u1[t]) * u2[t];
    out.direct = direct;

    const auto c1 = p1.canonical(mn);
    const auto c2 = p2.canonical(mn);
    const cvec et = dd_to_td(e, p);
    long d_shift = (c2.shift - c1.shift) % mn;
    if (d_shift < 0) d_shift += mn;
    const cdouble scale = std::conj(c1.scale) * c2.scale;

    auto gamma_pow = [mn](double x) {
        const double ang = 2.0 * M_PI * x / mn;
        return cdouble{std::cos(ang), std::sin(ang)};
    };

    cdouble sum{0.0, 0.0};
    cdouble lag_sum{0.0, 0.0}; // sum of e~*[n] e~[n'] without the Doppler phases
    for (int n = 0; n < mn; ++n) {
        const int n_in = static_cast<int>((n - d_shift + mn) % mn);
        const cdouble prod = std::conj(et[n]) * et[n_in];
        sum += gamma_pow(c2.exponent * n_in - c1.exponent * n) * prod;
        lag_sum += prod;
    }
    out.sum_form = scale * sum;

    double e_norm_sq = 0.0;
    for (const cdouble& v : e) e_norm_sq += std::norm(v);

    if (d_shift == 0) {
        cdouble same_delay{0.0, 0.0};
        for (int n = 0; n < mn; ++n)
            same_delay += gamma_pow((c2.exponent - c1.exponent) * n) * std::norm(et[n]);
        out.same_delay_form = scale * same_delay;
        out.same_delay_agrees =
            std::abs(out.direct - *out.same_delay_form) <= 1e-9 * std::max(e_norm_sq, 1.0);
    }
    if (std::abs(c1.exponent - c2.exponent) < 1e-12) {
        const cdouble approx = scale * gamma_pow(-static_cast<double>(d_shift) * c1.exponent) *
                               lag_sum;
        out.same_doppler_approx = approx;
        out.same_doppler_gap = std::abs(out.sum_form - approx);
    }
    return out;
}

cvec det_eval_error_pattern(int repeats, int mn) {
    require(repeats >= 1 && 3 * repeats <= mn, "error pattern does not fit the frame");
    cvec e(mn, cdouble{0.0, 0.0});
    for (int r = 0; r < repeats; ++r) {
        e[3 * r] = cdouble{2.0, 0.0};
        e[3 * r + 2] = cdouble{-2.0, 0.0};
    }
    return e;
}

namespace {

// Fractional Doppler values with a pairwise separation floor, by rejection.
std::vector<double> draw_separated_dopplers(int count, int k_max, double min_sep, Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<double> nu(count);
        for (int i = 0; i < count; ++i)
            nu[i] = rng.uniform_int(0, k_max) + rng.uniform(-0.5, 0.5);
        bool ok = true;
        for (int i = 0; i < count && ok; ++i)
            for (int j = i + 1; j < count && ok; ++j)
                if (std::abs(nu[i] - nu[j]) < min_sep) ok = false;
        if (ok) return nu;
    }
    throw ConfigError("Doppler separation constraint too tight for the grid");
}

} // namespace

ResultTable avg_determinant_experiment(const DetEvalConfig& cfg) {
    cfg.frame.validate();
    if (cfg.draws <= 0) throw ConfigError("draws must be positive");
    if (cfg.pattern_repeats.empty()) throw ConfigError("no error-pattern sizes given");
    const int mn = cfg.frame.mn();
    for (int p_count : cfg.p_values)
        if (p_count < 1 || p_count > std::min(cfg.frame.m, cfg.frame.n))
            throw ConfigError("path count outside 1..min(M, N)");
    const int n_rep = static_cast<int>(cfg.pattern_repeats.size());

    constexpr int kPolicies = 3;
    static const char* kSeries[kPolicies] = {"precoded", "nonprecoded_random",
                                             "nonprecoded_distinct_delay"};

    ResultTable table;
    table.metadata.emplace_back("experiment", "det-eval");
    for (int p_count : cfg.p_values) {
        // dets[draw][policy * n_rep + rep]
        std::vector<std::vector<double>> dets(
            cfg.draws, std::vector<double>(kPolicies * n_rep, 0.0));

#pragma omp parallel for schedule(dynamic)
        for (int draw = 0; draw < cfg.draws; ++draw) {
            Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(p_count), draw);
            std::vector<long> delays(p_count);
            for (long& l : delays) l = rng.uniform_int(0, cfg.l_max);
            const std::vector<double> dopplers = draw_separated_dopplers(
                p_count, cfg.k_max, cfg.min_doppler_separation, rng);
            std::vector<int> distinct_delays(p_count);
            rng.sample_distinct(cfg.frame.m, p_count, distinct_delays.begin());
            std::vector<int> vdelay(p_count), vdoppler(p_count);
            if (cfg.virtual_policy == VirtualIndexPolicy::Random) {
                rng.sample_distinct(cfg.frame.m, p_count, vdelay.begin());
                rng.sample_distinct(cfg.frame.n, p_count, vdoppler.begin());
            } else {
                for (int i = 0; i < p_count; ++i) {
                    vdelay[i] = i % cfg.frame.m;
                    vdoppler[i] = i % cfg.frame.n;
                }
            }

            const std::vector<double> unit_alpha(p_count, 1.0);
            for (int policy = 0; policy < kPolicies; ++policy) {
                std::vector<PathFactor> factors(p_count);
                for (int i = 0; i < p_count; ++i) {
                    switch (static_cast<DetChannelPolicy>(policy)) {
                        case DetChannelPolicy::Precoded:
                            factors[i].delay = delays[i];
                            factors[i].doppler = dopplers[i];
                            factors[i].precoder = {delays[i], dopplers[i], vdelay[i],
                                                   vdoppler[i]};
                            break;
                        case DetChannelPolicy::RandomIndices:
                            factors[i].delay = delays[i];
                            factors[i].doppler = dopplers[i];
                            break;
                        case DetChannelPolicy::DistinctDelayFractional:
                            factors[i].delay = distinct_delays[i];
                            factors[i].doppler = dopplers[i];
                            break;
                    }
                }
                for (int rep = 0; rep < n_rep; ++rep) {
                    const cvec e = det_eval_error_pattern(cfg.pattern_repeats[rep], mn);
                    const auto cdm = codeword_diff_matrix(e, factors, unit_alpha, cfg.frame);
                    dets[draw][policy * n_rep + rep] = cdm.omega.determinant().real();
                }
            }
        }

        for (int policy = 0; policy < kPolicies; ++policy) {
            for (int rep = 0; rep < n_rep; ++rep) {
                const double d_e_sq = 8.0 * cfg.pattern_repeats[rep];
                double mean = 0.0;
                for (int d = 0; d < cfg.draws; ++d) mean += dets[d][policy * n_rep + rep];
                mean /= cfg.draws;
                double sq = 0.0;
                for (int d = 0; d < cfg.draws; ++d) {
                    const double v = dets[d][policy * n_rep + rep] - mean;
                    sq += v * v;
                }
                const double sd = cfg.draws > 1 ? std::sqrt(sq / (cfg.draws - 1)) : 0.0;
                ResultRow row;
                row.series = std::string(kSeries[policy]) + "_p" + std::to_string(p_count);
                row.x = d_e_sq;
                row.metric = mean;
                row.n_trials = cfg.draws;
                row.ci_half_width = 1.959963984540054 * sd / std::sqrt(cfg.draws);
                table.rows.push_back(row);
            }
        }
        for (int rep = 0; rep < n_rep; ++rep) {
            const double d_e_sq = 8.0 * cfg.pattern_repeats[rep];
            ResultRow row;
            row.series = "bound_p" + std::to_string(p_count);
            row.x = d_e_sq;
            row.metric = std::pow(d_e_sq, p_count);
            row.n_trials = 0;
            row.ci_half_width = 0.0;
            table.rows.push_back(row);
        }
    }
    return table;
}

} // namespace ssotfs
