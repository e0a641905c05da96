#include "CLI11.hpp"

#include "ifsdim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dimensions of self-conformal measures for IFS with overlaps"};
    app.require_subcommand(1);

    ifsdim::RunConfig cfg;
    const std::pair<const char*, const char*> subs[] = {
        {"dimension", "entropy, Lyapunov, overlap number and the dimension formula"},
        {"overlap", "topological or measure overlap number estimate"},
        {"lyapunov", "Lyapunov exponent of the sampled measure"},
        {"pressure", "pressure of the selected potential"},
        {"bound", "partition-based lower dimension bounds"},
        {"verify", "dimension formula vs empirical pointwise dimension"},
        {"cloud", "emit sampled points of the projected measure"},
    };
    for (const auto& [name, desc] : subs) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--system", cfg.system_path, "system spec file (JSON)")->required();
        sub->add_option("--n", cfg.n, "cylinder word length");
        sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
        sub->add_option("--seed", cfg.seed, "master RNG seed (required)")->required();
        sub->add_option("--cover-depth", cfg.cover_depth, "limit-set cover depth");
        sub->add_option("--tau", cfg.tau, "genericity tolerance (<=0: auto)");
        sub->add_option("--q", cfg.q, "partition block length");
        sub->add_option("--psi", cfg.psi, "potential: auto|zero|weights|file");
        sub->add_option("--format", cfg.format, "output format: json|csv");
        sub->add_option("--out", cfg.out_path, "output path (default stdout)");
        sub->callback([&cfg, n = std::string(name)] { cfg.subcommand = n; });
    }

    CLI11_PARSE(app, argc, argv);
    return ifsdim::run_checked(cfg);
}
