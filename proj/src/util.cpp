#include "nmep/util.hpp"

#include <charconv>
#include <cstdlib>

namespace nmep {

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, p);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

cplx parse_complex(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError("empty complex literal");
    const char* begin = t.c_str();
    char* end = nullptr;
    double re = std::strtod(begin, &end);
    if (end == begin) throw ParseError("bad complex literal '" + t + "'");
    while (*end == ' ') ++end;
    if (*end == '\0') return {re, 0.0};
    // imaginary-only literal like "1j"
    if (*end == 'j' && end[1] == '\0') return {0.0, re};
    if (*end != '+' && *end != '-') throw ParseError("bad complex literal '" + t + "'");
    const char* imb = end;
    double im = std::strtod(imb, &end);
    if (end == imb || *end != 'j' || end[1] != '\0')
        throw ParseError("bad complex literal '" + t + "'");
    return {re, im};
}

} // namespace nmep
