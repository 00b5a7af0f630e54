#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "siegel/padic.hpp"

namespace siegel {

using Json = nlohmann::ordered_json;

class ParseError : public Error {
public:
    ParseError(size_t offset, const std::string& what)
        : Error("ParseError", what + " at byte " + std::to_string(offset)), offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

// Accepts `diag(a, b, ...)` with rational entries, or a JSON Gram matrix whose
// entries are integers or rational strings.
QuadLattice parse_lattice(const std::string& text, const PrimeCtx& ctx);
Q parse_rational_at(const std::string& text, size_t offset);

// `diag(...)` for diagonal Gram matrices, compact JSON otherwise.
std::string emit_lattice(const QuadLattice& L);

// Integers that fit in 64 bits become JSON numbers, everything else a string.
Json rational_json(const Q& v);
Json rationals_json(const std::vector<Q>& v);

// One header row of the top-level keys and one data row; nested values are
// written as compact JSON. RFC 4180 quoting.
std::string to_csv(const Json& obj);
std::string csv_field(const std::string& s);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace siegel
