#ifndef DEPOISSON_SEQSPEC_HPP
#define DEPOISSON_SEQSPEC_HPP

#include <memory>
#include <string>
#include <vector>

#include "depoisson/sequences.hpp"

namespace depoisson {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::vector<std::pair<Rational, Rational>> parse_atoms(const std::string& body,
                                                              const std::string& what) {
    // atoms are "w:p" pairs separated by commas; ':' separates the two
    // rationals because each of them may itself contain a '/'
    std::vector<std::pair<Rational, Rational>> atoms;
    for (const std::string& part : split(body, ',')) {
        std::vector<std::string> wp = split(part, ':');
        if (wp.size() != 2)
            throw std::invalid_argument(what + ": atom '" + part + "' is not of the form w:p");
        atoms.emplace_back(parse_rational(wp[0]), parse_rational(wp[1]));
    }
    return atoms;
}

}  // namespace detail

/// Builds a provider from a compact textual spec:
///   trie                      symmetric-trie expectation E S_n
///   geom:w:q[,w:q...]         sum of w q^m atoms, 0 < q < 1
///   expmix:w:c[,w:c...]       sum of w c^m atoms, c >= 1
///   const:c                   constant sequence
///   file:PATH                 one value per line, optional "# offset N"
/// All numeric parameters accept exact rationals ("2/3", "0.25", "3").
inline std::unique_ptr<Sequence> make_sequence(const std::string& spec) {
    if (spec == "trie") return std::make_unique<TrieSequence>();
    std::size_t colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string body = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (colon == std::string::npos || body.empty())
        throw std::invalid_argument("sequence spec '" + spec + "' is missing parameters");
    if (head == "geom")
        return std::make_unique<GeometricMixture>(detail::parse_atoms(body, "geom"));
    if (head == "expmix")
        return std::make_unique<ExpMixture>(detail::parse_atoms(body, "expmix"));
    if (head == "const") return std::make_unique<ConstantSequence>(parse_rational(body));
    if (head == "file") return std::make_unique<FileSequence>(body);
    throw std::invalid_argument("unknown sequence spec '" + spec +
                                "' (expected trie, geom:..., expmix:..., const:..., file:...)");
}

}  // namespace depoisson

#endif
