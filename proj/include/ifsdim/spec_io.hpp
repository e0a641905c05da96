#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "ifsdim/potential.hpp"
#include "ifsdim/systems.hpp"

namespace ifsdim {

// Parsed system-spec file: the system plus optional weights / potential.
struct SystemSpec {
    std::string type;
    std::optional<IfsSystem> system;
    std::optional<BernoulliWeights> weights;
    std::optional<LocalPotential> potential;
};

namespace detail {

inline std::complex<double> parse_complex(const nlohmann::json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument(std::string("expected number or [re, im] for ") + what);
}

} // namespace detail

// Numeric literals go through the JSON parser's strtod path, which rounds
// decimal text to the nearest double.
inline SystemSpec parse_system_spec(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("system spec: missing \"type\"");
    SystemSpec spec;
    spec.type = j.at("type").get<std::string>();
    const auto& maps = j.at("maps");
    if (!maps.is_array() || maps.empty())
        throw std::invalid_argument("system spec: \"maps\" must be a non-empty array");

    if (spec.type == "affine1d" || spec.type == "cubic1d") {
        if (!j.contains("seed") || !j.at("seed").is_array() || j.at("seed").size() != 2)
            throw std::invalid_argument("system spec: 1-D systems need \"seed\": [lo, hi]");
        SeedSet seed = SeedSet::interval(j.at("seed")[0].get<double>(),
                                         j.at("seed")[1].get<double>());
        std::vector<ConformalMap> built;
        for (const auto& m : maps) {
            if (spec.type == "affine1d") {
                built.emplace_back(AffineMap1D{m.at("a").get<double>(), m.at("b").get<double>()},
                                   seed.box);
            } else {
                built.emplace_back(CubicMap1D{m.at("lambda").get<double>(),
                                              m.value("eps", 0.0), m.at("offset").get<double>()},
                                   seed.box);
            }
        }
        spec.system.emplace(std::move(built), seed);
    } else if (spec.type == "julia2d") {
        JuliaSpec js;
        if (j.contains("seed")) {
            const auto& s = j.at("seed");
            js.r_lo = s.at("r_lo").get<double>();
            js.r_hi = s.at("r_hi").get<double>();
            js.auto_shrink = false;
        }
        for (const auto& m : maps) {
            JuliaMapSpec ms;
            ms.degree = m.at("degree").get<int>();
            if (m.contains("gamma")) ms.gamma = detail::parse_complex(m.at("gamma"), "gamma");
            if (m.contains("c")) ms.c = detail::parse_complex(m.at("c"), "c");
            if (m.contains("eps"))
                for (const auto& e : m.at("eps"))
                    ms.eps.push_back(detail::parse_complex(e, "eps"));
            js.maps.push_back(std::move(ms));
        }
        spec.system.emplace(mixed_julia(js));
    } else {
        throw std::invalid_argument("system spec: unknown type \"" + spec.type + "\"");
    }

    const std::size_t m = spec.system->alphabet_size();
    if (j.contains("weights")) {
        std::vector<double> p = j.at("weights").get<std::vector<double>>();
        if (p.size() != m)
            throw std::invalid_argument("system spec: weights size must match the alphabet");
        spec.weights.emplace(std::move(p));
    }
    if (j.contains("potential")) {
        const auto& pj = j.at("potential");
        spec.potential.emplace(m, pj.at("k").get<std::size_t>(),
                               pj.at("table").get<std::vector<double>>());
    }
    return spec;
}

inline SystemSpec load_system_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open system spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("unparseable system spec " + path + ": " + e.what());
    }
    return parse_system_spec(j);
}

// Everything a run needs; the seed has no wall-clock default on purpose.
struct RunConfig {
    std::string subcommand;
    std::string system_path;
    std::size_t n = 12;
    std::size_t samples = 2000;
    std::uint64_t seed = 0;
    std::size_t cover_depth = 10;
    double tau = -1.0; // <= 0: derived from the potential oscillation
    std::size_t q = 1;
    std::string psi = "auto"; // zero | weights | file | auto
    std::string format = "json";
    std::string out_path;

    bool operator==(const RunConfig&) const = default;
};

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
    return nlohmann::ordered_json{
        {"subcommand", c.subcommand}, {"system", c.system_path}, {"n", c.n},
        {"samples", c.samples},       {"seed", c.seed},          {"cover_depth", c.cover_depth},
        {"tau", c.tau},               {"q", c.q},                {"psi", c.psi},
        {"format", c.format},         {"out", c.out_path}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    c.system_path = j.at("system").get<std::string>();
    c.n = j.at("n").get<std::size_t>();
    c.samples = j.at("samples").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.cover_depth = j.at("cover_depth").get<std::size_t>();
    c.tau = j.at("tau").get<double>();
    c.q = j.at("q").get<std::size_t>();
    c.psi = j.at("psi").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.out_path = j.at("out").get<std::string>();
    return c;
}

inline void validate_config(const RunConfig& c) {
    const bool cylinder_route = c.subcommand == "dimension" || c.subcommand == "overlap" ||
                                c.subcommand == "verify";
    if (c.n < 1 || c.n > 100'000) throw std::invalid_argument("n must be in [1, 1e5]");
    if (cylinder_route && c.n > 64)
        throw std::invalid_argument("cylinder length n must be in [1, 64] for " + c.subcommand);
    if (c.samples < 1 || c.samples > 10'000'000)
        throw std::invalid_argument("samples must be in [1, 1e7]");
    if (c.cover_depth < 1 || c.cover_depth > 20)
        throw std::invalid_argument("cover-depth must be in [1, 20]");
    if (c.q < 1 || c.q > 12) throw std::invalid_argument("q must be in [1, 12]");
    if (c.format != "json" && c.format != "csv")
        throw std::invalid_argument("format must be json or csv");
    if (c.psi != "auto" && c.psi != "zero" && c.psi != "weights" && c.psi != "file")
        throw std::invalid_argument("psi must be auto, zero, weights or file");
}

} // namespace ifsdim
