#include "siegel/io.hpp"

#include <cctype>
#include <limits>

namespace siegel {

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;
    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(i, std::string("expected '") + c + "'");
    }
};

Q read_rational(Cursor& c) {
    c.skip();
    size_t start = c.i;
    if (c.i < c.s.size() && (c.s[c.i] == '-' || c.s[c.i] == '+')) ++c.i;
    size_t digits = c.i;
    while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
    if (c.i == digits) throw ParseError(c.i, "expected a number");
    if (c.i < c.s.size() && c.s[c.i] == '/') {
        ++c.i;
        size_t den = c.i;
        while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
        if (c.i == den) throw ParseError(c.i, "expected a denominator");
    }
    return parse_rational_at(c.s.substr(start, c.i - start), start);
}

QuadLattice parse_diag(const std::string& text, const PrimeCtx& ctx) {
    Cursor c{text};
    c.skip();
    if (text.compare(c.i, 4, "diag") != 0) throw ParseError(c.i, "expected 'diag'");
    c.i += 4;
    c.expect('(');
    std::vector<Q> d;
    d.push_back(read_rational(c));
    while (c.eat(',')) d.push_back(read_rational(c));
    c.expect(')');
    c.skip();
    if (c.i != text.size()) throw ParseError(c.i, "trailing characters");
    for (auto& x : d)
        if (x == 0) throw ParseError(0, "zero diagonal entry");
    return diag_lattice(ctx, d);
}

QuadLattice parse_json_gram(const std::string& text, const PrimeCtx& ctx) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte > 0 ? e.byte - 1 : 0, "malformed JSON Gram matrix");
    }
    if (!j.is_array() || j.empty()) throw ParseError(0, "Gram matrix must be a non-empty array of rows");
    Mat G;
    for (auto& row : j) {
        if (!row.is_array()) throw ParseError(0, "Gram matrix rows must be arrays");
        Vec r;
        for (auto& x : row) {
            if (x.is_number_integer())
                r.push_back(Q(x.dump()));
            else if (x.is_string())
                r.push_back(parse_rational_at(x.get<std::string>(), 0));
            else
                throw ParseError(0, "entries must be integers or rational strings");
        }
        G.push_back(r);
    }
    return make_lattice(ctx, G);
}

}  // namespace

Q parse_rational_at(const std::string& text, size_t offset) {
    size_t k = 0;
    if (k < text.size() && (text[k] == '-' || text[k] == '+')) ++k;
    size_t nd = 0;
    while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k, ++nd;
    if (nd == 0) throw ParseError(offset + k, "malformed rational '" + text + "'");
    if (k < text.size() && text[k] == '/') {
        ++k;
        size_t dd = 0;
        while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k, ++dd;
        if (dd == 0) throw ParseError(offset + k, "malformed rational '" + text + "'");
    }
    if (k != text.size()) throw ParseError(offset + k, "malformed rational '" + text + "'");
    std::string body = text[0] == '+' ? text.substr(1) : text;
    Q r;
    r.set_str(body, 10);
    if (r.get_den() == 0) throw ParseError(offset + text.find('/') + 1, "zero denominator");
    r.canonicalize();
    return r;
}

QuadLattice parse_lattice(const std::string& text, const PrimeCtx& ctx) {
    size_t k = 0;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k == text.size()) throw ParseError(k, "empty lattice descriptor");
    if (text[k] == '[') return parse_json_gram(text, ctx);
    return parse_diag(text, ctx);
}

std::string emit_lattice(const QuadLattice& L) {
    int n = L.rank();
    bool diagonal = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && L.gram[i][j] != 0) diagonal = false;
    std::string out;
    if (diagonal) {
        out = "diag(";
        for (int i = 0; i < n; ++i) {
            if (i) out += ',';
            out += to_string(L.gram[i][i]);
        }
        return out + ")";
    }
    Json j = Json::array();
    for (auto& row : L.gram) {
        Json r = Json::array();
        for (auto& x : row) r.push_back(rational_json(x));
        j.push_back(r);
    }
    return j.dump();
}

Json rational_json(const Q& v) {
    if (v.get_den() == 1 && v.get_num().fits_slong_p()) return static_cast<long long>(v.get_num().get_si());
    return to_string(v);
}

Json rationals_json(const std::vector<Q>& v) {
    Json a = Json::array();
    for (auto& x : v) a.push_back(rational_json(x));
    return a;
}

std::string csv_field(const std::string& s) {
    bool quote = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const Json& obj) {
    std::string head, row;
    bool first = true;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!first) {
            head += ',';
            row += ',';
        }
        first = false;
        head += csv_field(it.key());
        const Json& v = it.value();
        row += csv_field(v.is_string() ? v.get<std::string>() : v.dump());
    }
    return head + "\r\n" + row + "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = any = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(field);
            field.clear();
            rows.push_back(row);
            row.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace siegel
