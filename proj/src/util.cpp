#include "natid/util.hpp"

#include <charconv>
#include <cmath>

namespace natid {

double Rng::normal(double mean, double sd) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + sd * spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + sd * radius * std::cos(angle);
}

std::int64_t Rng::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    // Split large lambdas so the product of uniforms cannot underflow.
    if (lambda > 30.0) return poisson(lambda / 2) + poisson(lambda - lambda / 2);
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double product = uniform();
    while (product > limit) {
        ++k;
        product *= uniform();
    }
    return k;
}

std::string format_double(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

char32_t utf8_decode(const std::string& s, std::size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto cont = [&](std::size_t k) {
        return i + k < s.size() &&
               (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        char32_t cp = (b0 & 0x1Fu) << 6 |
                      (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        char32_t cp = (b0 & 0x0Fu) << 12 |
                      (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        char32_t cp = (b0 & 0x07u) << 18 |
                      (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
        i += 4;
        return cp;
    }
    ++i;
    return 0xFFFD;
}

void utf8_encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::size_t utf8_length(const std::string& s) {
    std::size_t i = 0, n = 0;
    while (i < s.size()) {
        utf8_decode(s, i);
        ++n;
    }
    return n;
}

namespace {

char32_t to_lower_cp(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    // Latin-1 Supplement uppercase block, skipping the multiplication sign.
    if ((cp >= 0x00C0 && cp <= 0x00D6) || (cp >= 0x00D8 && cp <= 0x00DE))
        return cp + 0x20;
    // Latin Extended-A pairs upper/lower code points.
    if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x0178) return 0x00FF;  // Y with diaeresis
    if (cp == 0x0179 || cp == 0x017B || cp == 0x017D) return cp + 1;
    return cp;
}

// Canonical composition for the Western European repertoire: combining mark
// applied to a lowercase base letter.
char32_t compose(char32_t base, char32_t mark) {
    struct Entry {
        char32_t base, mark, composed;
    };
    static const Entry table[] = {
        {'a', 0x0300, 0x00E0}, {'a', 0x0301, 0x00E1}, {'a', 0x0302, 0x00E2},
        {'a', 0x0303, 0x00E3}, {'a', 0x0308, 0x00E4}, {'a', 0x030A, 0x00E5},
        {'e', 0x0300, 0x00E8}, {'e', 0x0301, 0x00E9}, {'e', 0x0302, 0x00EA},
        {'e', 0x0308, 0x00EB}, {'i', 0x0300, 0x00EC}, {'i', 0x0301, 0x00ED},
        {'i', 0x0302, 0x00EE}, {'i', 0x0308, 0x00EF}, {'n', 0x0303, 0x00F1},
        {'o', 0x0300, 0x00F2}, {'o', 0x0301, 0x00F3}, {'o', 0x0302, 0x00F4},
        {'o', 0x0303, 0x00F5}, {'o', 0x0308, 0x00F6}, {'u', 0x0300, 0x00F9},
        {'u', 0x0301, 0x00FA}, {'u', 0x0302, 0x00FB}, {'u', 0x0308, 0x00FC},
        {'c', 0x0327, 0x00E7}, {'y', 0x0301, 0x00FD}, {'y', 0x0308, 0x00FF},
    };
    for (const auto& e : table)
        if (e.base == base && e.mark == mark) return e.composed;
    return 0;
}

bool is_combining(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

}  // namespace

std::string unicode_fold(const std::string& utf8, bool strip_diacritics) {
    std::vector<char32_t> cps;
    cps.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        char32_t cp = to_lower_cp(utf8_decode(utf8, i));
        if (is_combining(cp) && !cps.empty()) {
            if (char32_t c = compose(cps.back(), cp)) {
                cps.back() = c;
                continue;
            }
            if (strip_diacritics) continue;
        }
        cps.push_back(cp);
    }
    std::string out;
    out.reserve(utf8.size());
    for (char32_t cp : cps) utf8_encode(cp, out);
    return out;
}

}  // namespace natid
