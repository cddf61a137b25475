#include <racecurve/csv.hpp>

#include <cctype>
#include <charconv>
#include <cmath>

#include <racecurve/errors.hpp>

namespace racecurve::csv {

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::string& source, std::size_t line)
{
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
        throw ParseError(source, line, "expected a number, got '" + std::string(field) + "'");
    }
    return value;
}

std::int64_t parse_int(std::string_view field, const std::string& source, std::size_t line)
{
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(source, line, "expected an integer, got '" + std::string(field) + "'");
    }
    return value;
}

std::uint64_t parse_uint(std::string_view field, const std::string& source, std::size_t line)
{
    std::uint64_t value = 0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(source, line, "expected a non-negative integer, got '" + std::string(field) + "'");
    }
    return value;
}

bool next_record(std::istream& in, std::string& line, std::size_t& line_no)
{
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        return true;
    }
    return false;
}

}  // namespace racecurve::csv
