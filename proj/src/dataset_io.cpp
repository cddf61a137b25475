#include <racecurve/dataset_io.hpp>

#include <istream>
#include <ostream>

#include <racecurve/csv.hpp>
#include <racecurve/errors.hpp>

namespace racecurve {

Dataset read_dataset(std::istream& in, const std::string& source)
{
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return data;
    const auto header = csv::split(line);
    const bool with_block = header == std::vector<std::string>{"xi", "y", "block"};
    if (!with_block && header != std::vector<std::string>{"xi", "y"}) {
        throw ParseError(source, line_no, "expected header 'xi,y' or 'xi,y,block'");
    }
    const std::size_t width = with_block ? 3 : 2;
    while (csv::next_record(in, line, line_no)) {
        const auto f = csv::split(line);
        if (f.size() != width) {
            throw ParseError(source, line_no, "expected " + std::to_string(width) + " fields");
        }
        const double xi = csv::parse_double(f[0], source, line_no);
        const auto y = csv::parse_int(f[1], source, line_no);
        if (!(xi > 0.0 && xi < 1.0)) throw ParseError(source, line_no, "xi outside (0, 1)");
        if (y != 0 && y != 1) throw ParseError(source, line_no, "y must be 0 or 1");
        if (with_block) {
            data.add(xi, static_cast<int>(y), f[2]);
        } else {
            data.add(xi, static_cast<int>(y));
        }
    }
    return data;
}

void write_dataset(std::ostream& out, const Dataset& data)
{
    const bool with_block = data.has_blocks();
    out << (with_block ? "xi,y,block\n" : "xi,y\n");
    const auto obs = data.observations();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        out << csv::format_double(obs[i].xi.value()) << ',' << obs[i].y;
        if (with_block) out << ',' << data.blocks()[i];
        out << '\n';
    }
}

}  // namespace racecurve
