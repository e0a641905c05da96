#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifsdim/dimension.hpp"
#include "ifsdim/spec_io.hpp"

namespace ifsdim {

// Hand-rolled JSON emission: keys in fixed order, doubles always via
// "%.17g", so identical runs produce identical bytes.
class JsonEmitter {
public:
    std::string take() { return std::move(buf_); }

    JsonEmitter& begin_object() { open('{'); return *this; }
    JsonEmitter& end_object() { close('}'); return *this; }
    JsonEmitter& begin_array() { open('['); return *this; }
    JsonEmitter& end_array() { close(']'); return *this; }

    JsonEmitter& key(const std::string& k) {
        comma();
        buf_ += '"';
        buf_ += k;
        buf_ += "\":";
        pending_value_ = true;
        return *this;
    }

    JsonEmitter& value(double v) { comma(); buf_ += format_double(v); return *this; }
    JsonEmitter& value(std::uint64_t v) { comma(); buf_ += std::to_string(v); return *this; }
    JsonEmitter& value(int v) { comma(); buf_ += std::to_string(v); return *this; }
    JsonEmitter& value(bool v) { comma(); buf_ += v ? "true" : "false"; return *this; }
    JsonEmitter& value_null() { comma(); buf_ += "null"; return *this; }
    JsonEmitter& value(const std::string& s) {
        comma();
        buf_ += '"';
        for (char c : s) {
            if (c == '"' || c == '\\') { buf_ += '\\'; buf_ += c; }
            else if (c == '\n') buf_ += "\\n";
            else buf_ += c;
        }
        buf_ += '"';
        return *this;
    }
    JsonEmitter& value(const char* s) { return value(std::string(s)); }

    static std::string format_double(double v) {
        char tmp[40];
        std::snprintf(tmp, sizeof tmp, "%.17g", v);
        return tmp;
    }

private:
    void open(char c) { comma(); buf_ += c; fresh_ = true; }
    void close(char c) { buf_ += c; fresh_ = false; }
    void comma() {
        if (pending_value_) { pending_value_ = false; return; }
        if (!fresh_ && !buf_.empty() && buf_.back() != '{' && buf_.back() != '[') buf_ += ',';
        fresh_ = false;
    }

    std::string buf_;
    bool fresh_ = true;
    bool pending_value_ = false;
};

namespace detail {

inline void emit_config(JsonEmitter& e, const RunConfig& c) {
    e.key("config").begin_object();
    e.key("subcommand").value(c.subcommand);
    e.key("system").value(c.system_path);
    e.key("n").value(c.n);
    e.key("samples").value(c.samples);
    e.key("seed").value(c.seed);
    e.key("cover_depth").value(c.cover_depth);
    e.key("tau").value(c.tau);
    e.key("q").value(c.q);
    e.key("psi").value(c.psi);
    e.key("format").value(c.format);
    e.key("out").value(c.out_path);
    e.end_object();
}

inline void emit_flags(JsonEmitter& e, const std::vector<std::string>& flags) {
    e.key("flags").begin_array();
    for (const auto& f : flags) e.value(f);
    e.end_array();
}

inline void emit_overlap_fields(JsonEmitter& e, const OverlapEstimate& est) {
    e.key("n").value(est.n);
    e.key("tau").value(est.tau);
    e.key("samples").value(est.sample_count);
    e.key("mean").value(est.mean);
    e.key("std_error").value(est.std_error);
    e.key("bracket").begin_array().value(est.bracket_lo).value(est.bracket_hi).end_array();
    e.key("lower_mean").value(est.lower_mean);
    e.key("shallow_mean").value(est.shallow_mean);
    e.key("tau_sensitivity").begin_object();
    e.key("double").value(est.mean_tau_double);
    e.key("half").value(est.mean_tau_half);
    e.end_object();
    e.key("truncated_samples").value(est.truncated_samples);
    e.key("clamped_samples").value(est.clamped_samples);
}

} // namespace detail

inline std::vector<std::string> report_flags(const DimensionReport& rep) {
    std::vector<std::string> flags;
    if (rep.overlap.truncated()) flags.push_back("truncated");
    if (rep.flags.inconclusive) flags.push_back("inconclusive");
    if (rep.overlap.tau_warning) flags.push_back("tau_warning");
    if (rep.bound_clamped) flags.push_back("bound_clamped");
    return flags;
}

inline std::string render_dimension_report(const DimensionReport& rep, const RunConfig& cfg) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("h").value(rep.h);
    e.key("chi").value(rep.chi);
    e.key("chi_err").value(rep.chi_err);
    if (rep.chi_exact) e.key("chi_exact").value(*rep.chi_exact);
    else e.key("chi_exact").value_null();
    e.key("log_o").value(rep.log_o);
    e.key("log_o_err").value(rep.overlap.std_error);
    e.key("log_o_bracket").begin_array().value(rep.overlap.bracket_lo)
        .value(rep.overlap.bracket_hi).end_array();
    e.key("tau").value(rep.overlap.tau);
    e.key("hd").value(rep.hd);
    e.key("hd_naive").value(rep.hd_naive);
    if (rep.bound) e.key("bound").value(*rep.bound);
    else e.key("bound").value_null();
    e.key("drop").value(rep.flags.drop);
    e.key("separated").value(rep.flags.separated);
    detail::emit_flags(e, report_flags(rep));
    if (rep.empirical) {
        e.key("empirical").begin_object();
        e.key("median").value(rep.empirical->median);
        e.key("iqr").value(rep.empirical->iqr);
        e.key("pivots").value(rep.empirical->pivots_used);
        e.end_object();
    } else {
        e.key("empirical").value_null();
    }
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

inline std::string render_overlap_report(const OverlapEstimate& est, const RunConfig& cfg,
                                         const std::string& kind) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("kind").value(kind);
    detail::emit_overlap_fields(e, est);
    std::vector<std::string> flags;
    if (est.truncated()) flags.push_back("truncated");
    if (est.tau_warning) flags.push_back("tau_warning");
    detail::emit_flags(e, flags);
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

inline std::string render_lyapunov_report(const LyapunovEstimate& est, const RunConfig& cfg) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("chi").value(est.chi);
    e.key("chi_err").value(est.std_error);
    if (est.exact) e.key("chi_exact").value(*est.exact);
    else e.key("chi_exact").value_null();
    detail::emit_flags(e, {});
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

inline std::string render_pressure_report(double p, const RunConfig& cfg) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("pressure").value(p);
    detail::emit_flags(e, {});
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

inline std::string render_bound_report(const PartitionScheme& scheme, bool accepted,
                                       const LowerBound& qint, const LowerBound& scm,
                                       double chi, const RunConfig& cfg) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("q").value(scheme.q);
    e.key("groups").begin_array();
    for (const auto& g : scheme.groups) {
        e.begin_array();
        for (std::size_t w : g) e.value(w);
        e.end_array();
    }
    e.end_array();
    e.key("cardinalities").begin_array();
    for (std::size_t c : scheme.cardinalities()) e.value(c);
    e.end_array();
    e.key("accepted").value(accepted);
    e.key("chi").value(chi);
    e.key("bound_qint").value(qint.value);
    e.key("bound_scm").value(scm.value);
    std::vector<std::string> flags;
    if (qint.clamped || scm.clamped) flags.push_back("bound_clamped");
    if (!accepted) flags.push_back("partition_rejected");
    detail::emit_flags(e, flags);
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

inline std::string render_verify_report(const DimensionReport& rep, const RunConfig& cfg) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("formula").begin_object();
    e.key("h").value(rep.h);
    e.key("chi").value(rep.chi);
    e.key("log_o").value(rep.log_o);
    e.key("hd").value(rep.hd);
    e.key("hd_naive").value(rep.hd_naive);
    e.end_object();
    e.key("empirical").begin_object();
    e.key("median").value(rep.empirical ? rep.empirical->median : 0.0);
    e.key("iqr").value(rep.empirical ? rep.empirical->iqr : 0.0);
    e.end_object();
    e.key("delta").value(rep.empirical ? rep.hd - rep.empirical->median : 0.0);
    e.key("drop").value(rep.flags.drop);
    e.key("separated").value(rep.flags.separated);
    detail::emit_flags(e, report_flags(rep));
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

// Point cloud: CSV with header "x" (1-D) or "x,y" (2-D), numeric-only rows.
inline std::string render_cloud_csv(const std::vector<Point>& pts, int dim) {
    std::string s = dim == 2 ? "x,y\n" : "x\n";
    for (const auto& p : pts) {
        s += JsonEmitter::format_double(p.real());
        if (dim == 2) {
            s += ',';
            s += JsonEmitter::format_double(p.imag());
        }
        s += '\n';
    }
    return s;
}

inline std::string render_cloud_json(const std::vector<Point>& pts, int dim,
                                     const RunConfig& cfg) {
    JsonEmitter e;
    e.begin_object();
    detail::emit_config(e, cfg);
    e.key("points").begin_array();
    for (const auto& p : pts) {
        if (dim == 2)
            e.begin_array().value(p.real()).value(p.imag()).end_array();
        else
            e.value(p.real());
    }
    e.end_array();
    e.end_object();
    std::string s = e.take();
    s += '\n';
    return s;
}

inline void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

} // namespace ifsdim
