#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ifsdim/word.hpp"

namespace ifsdim {

struct BernoulliWeights {
    std::vector<double> p;

    explicit BernoulliWeights(std::vector<double> probs) : p(std::move(probs)) {
        if (p.empty()) throw std::invalid_argument("empty probability vector");
        double sum = 0.0;
        for (double v : p) {
            if (v < 0.0) throw std::invalid_argument("negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("probabilities must sum to 1");
    }

    std::size_t size() const { return p.size(); }
};

// k-locally-constant potential: psi(omega) = table[omega_1 ... omega_k],
// row-major with omega_1 most significant.
class LocalPotential {
public:
    LocalPotential(std::size_t m, std::size_t k, std::vector<double> table)
        : m_(m), k_(k), table_(std::move(table)) {
        if (m_ == 0 || k_ == 0) throw std::invalid_argument("potential needs m >= 1, k >= 1");
        std::size_t want = 1;
        for (std::size_t i = 0; i < k_; ++i) want *= m_;
        if (table_.size() != want)
            throw std::invalid_argument("potential table must have m^k entries");
        for (double v : table_)
            if (!std::isfinite(v)) throw std::invalid_argument("potential entries must be finite");
    }

    static LocalPotential zero(std::size_t m) {
        return LocalPotential(m, 1, std::vector<double>(m, 0.0));
    }
    static LocalPotential log_weights(const BernoulliWeights& w) {
        std::vector<double> t(w.p.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (w.p[i] <= 0.0) throw std::invalid_argument("log_weights needs strictly positive p");
            t[i] = std::log(w.p[i]);
        }
        return LocalPotential(w.p.size(), 1, std::move(t));
    }

    std::size_t alphabet_size() const { return m_; }
    std::size_t locality() const { return k_; }
    const std::vector<double>& table() const { return table_; }

    double min_value() const { return *std::min_element(table_.begin(), table_.end()); }
    double max_value() const { return *std::max_element(table_.begin(), table_.end()); }
    // Bound on how much S_n psi can depend on the tail beyond the word.
    double oscillation_bound() const {
        return static_cast<double>(k_ - 1) * (max_value() - min_value());
    }

    // psi evaluated on the shifted word sigma^j(w . 000...), i.e. the k-window
    // starting at position j (0-based), padded with symbol 0 past the end.
    double window_value(const Word& w, std::size_t j) const {
        std::size_t idx = 0;
        for (std::size_t t = 0; t < k_; ++t) {
            Symbol s = (j + t < w.size()) ? w[j + t] : Symbol{0};
            idx = idx * m_ + s;
        }
        return table_[idx];
    }

    LocalPotential shifted(double c) const {
        std::vector<double> t = table_;
        for (double& v : t) v += c;
        return LocalPotential(m_, k_, std::move(t));
    }

private:
    std::size_t m_;
    std::size_t k_;
    std::vector<double> table_;
};

struct BirkhoffSum {
    double value;
    double oscillation_bound;
};

// S_n psi evaluated on w with the all-zeros tail convention; the bound
// brackets every other tail choice.
inline BirkhoffSum birkhoff_sum(const LocalPotential& psi, const Word& w) {
    if (w.empty()) throw std::invalid_argument("birkhoff_sum needs |w| >= 1");
    check_word(w, psi.alphabet_size());
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += psi.window_value(w, j);
    return {s, psi.oscillation_bound()};
}

} // namespace ifsdim
