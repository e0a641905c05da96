#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifsdim {

using Symbol = std::uint8_t;

// Finite symbol sequence over the alphabet {0,...,m-1}. The empty word is
// the identity composition.
struct Word {
    std::vector<Symbol> symbols;

    Word() = default;
    Word(std::initializer_list<Symbol> s) : symbols(s) {}
    explicit Word(std::vector<Symbol> s) : symbols(std::move(s)) {}

    std::size_t size() const { return symbols.size(); }
    bool empty() const { return symbols.empty(); }
    Symbol operator[](std::size_t i) const { return symbols[i]; }

    Word reversed() const {
        Word r = *this;
        std::reverse(r.symbols.begin(), r.symbols.end());
        return r;
    }

    Word prefix(std::size_t n) const {
        return Word(std::vector<Symbol>(symbols.begin(), symbols.begin() + n));
    }

    Word suffix_from(std::size_t pos) const {
        return Word(std::vector<Symbol>(symbols.begin() + pos, symbols.end()));
    }

    Word concat(const Word& tail) const {
        Word r = *this;
        r.symbols.insert(r.symbols.end(), tail.symbols.begin(), tail.symbols.end());
        return r;
    }

    Word appended(Symbol s) const {
        Word r = *this;
        r.symbols.push_back(s);
        return r;
    }

    bool operator==(const Word&) const = default;

    std::string str() const {
        std::string s;
        for (Symbol c : symbols) { s += std::to_string(int(c)); }
        return s;
    }
};

inline void check_word(const Word& w, std::size_t alphabet) {
    for (Symbol s : w.symbols)
        if (s >= alphabet)
            throw std::out_of_range("word symbol " + std::to_string(int(s)) +
                                    " outside alphabet of size " + std::to_string(alphabet));
}

// Row-major index of a fixed-length word, first symbol most significant.
inline std::size_t word_index(const Word& w, std::size_t m) {
    std::size_t idx = 0;
    for (Symbol s : w.symbols) idx = idx * m + s;
    return idx;
}

inline Word word_from_index(std::size_t idx, std::size_t m, std::size_t len) {
    std::vector<Symbol> s(len);
    for (std::size_t i = len; i-- > 0;) {
        s[i] = static_cast<Symbol>(idx % m);
        idx /= m;
    }
    return Word(std::move(s));
}

} // namespace ifsdim
