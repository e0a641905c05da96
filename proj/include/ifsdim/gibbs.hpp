#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ifsdim/potential.hpp"
#include "ifsdim/rng.hpp"
#include "ifsdim/word.hpp"

namespace ifsdim {

// Equilibrium (Gibbs) measure of a k-local potential, realized as a Markov
// measure on (k-1)-word states (a single abstract state when k = 1).
// Built from the left/right Perron eigenvectors of the weighted transition
// operator; pressure is the log of its spectral radius.
class GibbsMeasure {
public:
    std::size_t alphabet_size() const { return m_; }
    std::size_t locality() const { return k_; }
    std::size_t state_count() const { return states_; }
    double pressure() const { return pressure_; }
    const std::vector<double>& stationary() const { return stationary_; }

    // psi values by k-word index; -inf entries appear only for measures built
    // from weight vectors with zero components.
    const std::vector<double>& psi_table() const { return psi_table_; }

    double transition(std::size_t state, Symbol j) const {
        return trans_[state * m_ + j];
    }
    std::size_t next_state(std::size_t state, Symbol j) const {
        return k_ <= 1 ? 0 : (state % tail_mod_) * m_ + j;
    }

    // mu of the cylinder [w].
    double cylinder_mass(const Word& w) const {
        check_word(w, m_);
        if (w.empty()) return 1.0;
        const std::size_t n = w.size();
        if (n < k_ - 1) {
            // Sum stationary mass of all states extending w.
            double acc = 0.0;
            for (std::size_t s = 0; s < states_; ++s) {
                if (state_has_prefix(s, w)) acc += stationary_[s];
            }
            return acc;
        }
        std::size_t s = 0;
        for (std::size_t i = 0; i + 1 < k_; ++i) s = s * m_ + w[i];
        double mass = stationary_[s];
        for (std::size_t i = k_ - 1; i < n; ++i) {
            mass *= transition(s, w[i]);
            s = next_state(s, w[i]);
        }
        return mass;
    }

    // Word of length n distributed per mu on n-cylinders.
    Word sample_word(std::size_t n, Rng& rng) const {
        if (n == 0) throw std::invalid_argument("sample_word needs n >= 1");
        std::vector<Symbol> out;
        out.reserve(n);
        std::size_t s = rng.pick(stationary_);
        if (k_ >= 2) {
            // The state spells the first k-1 symbols.
            std::size_t idx = s;
            std::vector<Symbol> head(k_ - 1);
            for (std::size_t i = k_ - 1; i-- > 0;) {
                head[i] = static_cast<Symbol>(idx % m_);
                idx /= m_;
            }
            for (Symbol c : head) {
                out.push_back(c);
                if (out.size() == n) return Word(std::move(out));
            }
        }
        while (out.size() < n) {
            std::span<const double> row(trans_.data() + s * m_, m_);
            Symbol j = static_cast<Symbol>(rng.pick(row));
            out.push_back(j);
            s = next_state(s, j);
        }
        return Word(std::move(out));
    }

    // Integral of the defining potential against mu.
    double potential_integral() const {
        double acc = 0.0;
        for (std::size_t s = 0; s < states_; ++s)
            for (std::size_t j = 0; j < m_; ++j) {
                double q = trans_[s * m_ + j];
                if (q > 0.0) acc += stationary_[s] * q * psi_table_[s * m_ + j];
            }
        return acc;
    }

    friend GibbsMeasure equilibrium_measure(const LocalPotential& psi);
    friend GibbsMeasure gibbs_from_weights(const BernoulliWeights& w);

private:
    GibbsMeasure() = default;

    bool state_has_prefix(std::size_t state, const Word& w) const {
        std::vector<Symbol> sym(k_ - 1);
        std::size_t idx = state;
        for (std::size_t i = k_ - 1; i-- > 0;) {
            sym[i] = static_cast<Symbol>(idx % m_);
            idx /= m_;
        }
        for (std::size_t i = 0; i < w.size(); ++i)
            if (sym[i] != w[i]) return false;
        return true;
    }

    std::size_t m_ = 0;
    std::size_t k_ = 1;
    std::size_t states_ = 1;
    std::size_t tail_mod_ = 1; // m^(k-2), shift modulus for state updates
    double pressure_ = 0.0;
    std::vector<double> trans_;      // states x m transition probabilities
    std::vector<double> stationary_; // fixed vector of the transition matrix
    std::vector<double> psi_table_;  // k-word indexed potential values
};

namespace detail {

struct PerronResult {
    double lambda;
    std::vector<double> right;
    std::vector<double> left;
};

// Power iteration with Perron normalization on the strictly positive
// weighted operator. Caps at 1e5 sweeps; convergence at 1e-13 relative.
inline PerronResult perron_eigen(std::size_t states, std::size_t m,
                                 const std::vector<double>& wgt,
                                 auto&& next_state) {
    auto apply_right = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t s = 0; s < states; ++s) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                acc += wgt[s * m + j] * v[next_state(s, j)];
            out[s] = acc;
        }
    };
    auto apply_left = [&](const std::vector<double>& v, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t j = 0; j < m; ++j)
                out[next_state(s, j)] += wgt[s * m + j] * v[s];
    };

    auto iterate = [&](auto&& apply) {
        std::vector<double> v(states, 1.0 / static_cast<double>(states));
        std::vector<double> nv(states);
        double lambda = 0.0;
        for (int it = 0; it < 100000; ++it) {
            apply(v, nv);
            double sum = 0.0;
            for (double x : nv) sum += x;
            if (!(sum > 0.0) || !std::isfinite(sum))
                throw std::runtime_error("eigen-iteration diverged (ill-conditioned table)");
            double nl = sum;
            for (auto& x : nv) x /= sum;
            // The eigenvalue can stabilize before the vector does (it is
            // exact from the start for stochastic weights), so require both.
            double dv = 0.0;
            for (std::size_t s = 0; s < states; ++s)
                dv = std::max(dv, std::abs(nv[s] - v[s]));
            std::swap(v, nv);
            if (std::abs(nl - lambda) <= 1e-13 * std::max(1.0, std::abs(nl)) && dv <= 1e-14)
                return std::pair{nl, v};
            lambda = nl;
        }
        throw std::runtime_error("eigen-iteration did not converge within the cap");
    };

    auto [lr, right] = iterate(apply_right);
    auto [ll, left] = iterate(apply_left);
    (void)ll;
    return {lr, std::move(right), std::move(left)};
}

} // namespace detail

inline GibbsMeasure equilibrium_measure(const LocalPotential& psi) {
    const std::size_t m = psi.alphabet_size();
    const std::size_t k = psi.locality();
    std::size_t states = 1;
    for (std::size_t i = 0; i + 1 < k; ++i) states *= m;
    std::size_t tail_mod = k >= 2 ? states / m : 1;
    if (k == 1) tail_mod = 1;

    GibbsMeasure mu;
    mu.m_ = m;
    mu.k_ = k;
    mu.states_ = states;
    mu.tail_mod_ = std::max<std::size_t>(tail_mod, 1);
    mu.psi_table_ = psi.table();

    std::vector<double> wgt(states * m);
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t j = 0; j < m; ++j)
            wgt[s * m + j] = std::exp(psi.table()[s * m + j]);

    auto next = [&](std::size_t s, std::size_t j) {
        return k <= 1 ? 0 : (s % mu.tail_mod_) * m + j;
    };
    auto eig = detail::perron_eigen(states, m, wgt, next);
    mu.pressure_ = std::log(eig.lambda);

    mu.trans_.resize(states * m);
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t j = 0; j < m; ++j)
            mu.trans_[s * m + j] =
                wgt[s * m + j] * eig.right[next(s, j)] / (eig.lambda * eig.right[s]);

    mu.stationary_.resize(states);
    double norm = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
        mu.stationary_[s] = eig.left[s] * eig.right[s];
        norm += mu.stationary_[s];
    }
    for (auto& x : mu.stationary_) x /= norm;
    return mu;
}

// Bernoulli measure as the k = 1 Gibbs state of log p; zero weights are
// allowed here (the transfer-operator route requires strict positivity).
inline GibbsMeasure gibbs_from_weights(const BernoulliWeights& w) {
    GibbsMeasure mu;
    mu.m_ = w.size();
    mu.k_ = 1;
    mu.states_ = 1;
    mu.tail_mod_ = 1;
    mu.pressure_ = 0.0;
    mu.trans_ = w.p;
    mu.stationary_ = {1.0};
    mu.psi_table_.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        mu.psi_table_[i] = w.p[i] > 0.0 ? std::log(w.p[i])
                                        : -std::numeric_limits<double>::infinity();
    return mu;
}

// P(psi) = log of the spectral radius of the weighted transition operator.
inline double pressure(const LocalPotential& psi) {
    return equilibrium_measure(psi).pressure();
}

// Entropy rate of the Markov chain; [0, log m].
inline double entropy(const GibbsMeasure& mu) {
    const std::size_t m = mu.alphabet_size();
    const double unif = 1.0 / static_cast<double>(m);
    bool uniform = true;
    double h = 0.0;
    for (std::size_t s = 0; s < mu.state_count(); ++s) {
        double hs = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double q = mu.transition(s, static_cast<Symbol>(j));
            if (q != unif) uniform = false;
            if (q > 0.0) hs -= q * std::log(q);
        }
        h += mu.stationary()[s] * hs;
    }
    if (uniform) return std::log(static_cast<double>(m));
    return h;
}

// |h(mu) + int psi dmu - P(psi)|; small residual certifies the eigen-solution.
inline double variational_residual(const LocalPotential& psi, const GibbsMeasure& mu) {
    double integral = 0.0;
    for (std::size_t s = 0; s < mu.state_count(); ++s)
        for (std::size_t j = 0; j < psi.alphabet_size(); ++j) {
            double q = mu.transition(s, static_cast<Symbol>(j));
            if (q > 0.0)
                integral += mu.stationary()[s] * q * psi.table()[s * psi.alphabet_size() + j];
        }
    return std::abs(entropy(mu) + integral - mu.pressure());
}

} // namespace ifsdim
