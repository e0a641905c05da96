#pragma once

#include <iostream>
#include <string>

#include "ifsdim/report.hpp"

namespace ifsdim {

// Exit codes: 0 success, 1 validation error, 2 truncated/inconclusive
// results (reports are still written in that case).
enum ExitCode : int { kOk = 0, kInvalid = 1, kInconclusive = 2 };

namespace detail {

inline BernoulliWeights resolve_weights(const SystemSpec& spec) {
    if (spec.weights) return *spec.weights;
    const std::size_t m = spec.system->alphabet_size();
    return BernoulliWeights(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

inline std::string resolve_psi_kind(const RunConfig& cfg, const SystemSpec& spec) {
    if (cfg.psi != "auto") return cfg.psi;
    if (spec.potential) return "file";
    if (spec.weights) return "weights";
    return "zero";
}

inline LocalPotential resolve_potential(const std::string& kind, const SystemSpec& spec) {
    const std::size_t m = spec.system->alphabet_size();
    if (kind == "zero") return LocalPotential::zero(m);
    if (kind == "weights") return LocalPotential::log_weights(resolve_weights(spec));
    if (kind == "file") {
        if (!spec.potential)
            throw std::invalid_argument("--psi file requires a \"potential\" entry in the spec");
        return *spec.potential;
    }
    throw std::invalid_argument("unknown psi kind: " + kind);
}

inline OverlapOptions overlap_options(const RunConfig& cfg) {
    OverlapOptions opt;
    opt.n = cfg.n;
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;
    opt.tau = cfg.tau;
    opt.membership.cover_depth = cfg.cover_depth;
    return opt;
}

inline DimensionOptions dimension_options(const RunConfig& cfg, bool with_empirical) {
    DimensionOptions opt;
    opt.overlap = overlap_options(cfg);
    opt.partition_q = cfg.q;
    opt.with_empirical = with_empirical;
    opt.empirical.points = 10'000;
    return opt;
}

} // namespace detail

// Executes one parsed command; throws std::invalid_argument on bad input.
inline int run_config(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.seed == 0)
        throw std::invalid_argument("a nonzero --seed is required (no wall-clock default)");
    SystemSpec spec = load_system_spec(cfg.system_path);
    const IfsSystem& sys = *spec.system;

    if (cfg.format == "csv" && cfg.subcommand != "cloud")
        throw std::invalid_argument("csv output is only available for the cloud subcommand");

    if (cfg.subcommand == "dimension" || cfg.subcommand == "verify") {
        const bool with_empirical = cfg.subcommand == "verify";
        auto rep = self_conformal_dimension(sys, detail::resolve_weights(spec),
                                            detail::dimension_options(cfg, with_empirical));
        std::string text = with_empirical ? render_verify_report(rep, cfg)
                                          : render_dimension_report(rep, cfg);
        write_text(text, cfg.out_path);
        return rep.truncated() || rep.flags.inconclusive ? kInconclusive : kOk;
    }

    if (cfg.subcommand == "overlap") {
        const std::string kind = detail::resolve_psi_kind(cfg, spec);
        OverlapEstimate est;
        if (kind == "zero") {
            est = topological_overlap(sys, detail::overlap_options(cfg));
        } else if (kind == "weights") {
            est = measure_overlap(sys, gibbs_from_weights(detail::resolve_weights(spec)),
                                  detail::overlap_options(cfg));
        } else {
            est = measure_overlap(sys, equilibrium_measure(detail::resolve_potential(kind, spec)),
                                  detail::overlap_options(cfg));
        }
        write_text(render_overlap_report(est, cfg, kind == "zero" ? "topological" : "measure"),
                   cfg.out_path);
        return est.truncated() ? kInconclusive : kOk;
    }

    if (cfg.subcommand == "lyapunov") {
        auto mu = gibbs_from_weights(detail::resolve_weights(spec));
        auto est = lyapunov(sys, mu, std::max<std::size_t>(cfg.n, 100), cfg.samples, cfg.seed);
        write_text(render_lyapunov_report(est, cfg), cfg.out_path);
        return kOk;
    }

    if (cfg.subcommand == "pressure") {
        const std::string kind = detail::resolve_psi_kind(cfg, spec);
        double p = pressure(detail::resolve_potential(kind, spec));
        write_text(render_pressure_report(p, cfg), cfg.out_path);
        return kOk;
    }

    if (cfg.subcommand == "bound") {
        auto scheme = default_partition(sys, cfg.q);
        bool accepted = verify_partition(sys, scheme).accepted;
        auto weights = detail::resolve_weights(spec);
        auto mu = gibbs_from_weights(weights);
        auto lyap = lyapunov(sys, mu, 1000, std::min<std::size_t>(cfg.samples, 400), cfg.seed);
        double chi = lyap.exact ? *lyap.exact : lyap.chi;
        auto qint = qint_lower_bound(sys, scheme, mu, chi);
        auto scm = scm_lower_bound(sys, scheme, weights, chi);
        write_text(render_bound_report(scheme, accepted, qint, scm, chi, cfg), cfg.out_path);
        return accepted ? kOk : kInconclusive;
    }

    if (cfg.subcommand == "cloud") {
        auto mu = gibbs_from_weights(detail::resolve_weights(spec));
        std::vector<Point> pts(cfg.samples);
        parallel_for(cfg.samples, [&](std::size_t i) {
            Rng rng = Rng::stream(cfg.seed, i);
            pts[i] = pi_point(sys, mu.sample_word(40, rng)).point;
        });
        std::string text = cfg.format == "csv"
                               ? render_cloud_csv(pts, sys.ambient_dim())
                               : render_cloud_json(pts, sys.ambient_dim(), cfg);
        write_text(text, cfg.out_path);
        return kOk;
    }

    throw std::invalid_argument("unknown subcommand: " + cfg.subcommand);
}

// argv-level wrapper used by the binary: maps exceptions to exit code 1.
inline int run_checked(const RunConfig& cfg) {
    try {
        return run_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
}

} // namespace ifsdim
