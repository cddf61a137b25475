#include <racecurve/names.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <tuple>

#include <racecurve/csv.hpp>
#include <racecurve/errors.hpp>

namespace racecurve {

std::string normalize_name(std::string_view name)
{
    return csv::lower(csv::trim(name));
}

NameFrequencyTable::NameFrequencyTable(NameCountMap first_names, NameCountMap last_names,
                                       PopulationTotals totals)
    : first_(std::move(first_names)), last_(std::move(last_names)), totals_(totals)
{
    if (totals_.white == 0 || totals_.black == 0) {
        throw DomainError("population totals must be positive");
    }
    for (const auto* map : {&first_, &last_}) {
        for (const auto& [name, c] : *map) {
            if (c.white > totals_.white || c.black > totals_.black) {
                throw DomainError("count for '" + name + "' exceeds the population total");
            }
        }
    }
}

const NameCounts* NameFrequencyTable::find_first(std::string_view name) const
{
    const auto it = first_.find(normalize_name(name));
    return it == first_.end() ? nullptr : &it->second;
}

const NameCounts* NameFrequencyTable::find_last(std::string_view name) const
{
    const auto it = last_.find(normalize_name(name));
    return it == last_.end() ? nullptr : &it->second;
}

namespace {

std::uint64_t parse_count(const std::string& field, const std::string& source, std::size_t line)
{
    const auto value = csv::parse_int(field, source, line);
    if (value < 0) {
        throw NegativeCountError(source + ":" + std::to_string(line) + ": negative count " + field);
    }
    return static_cast<std::uint64_t>(value);
}

}  // namespace

NameCountMap read_name_counts(std::istream& in, const std::string& source)
{
    NameCountMap out;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return out;
    const auto header = csv::split(line);
    if (header != std::vector<std::string>{"name", "white_count", "black_count"}) {
        throw ParseError(source, line_no, "expected header 'name,white_count,black_count'");
    }
    while (csv::next_record(in, line, line_no)) {
        const auto fields = csv::split(line);
        if (fields.size() != 3) throw ParseError(source, line_no, "expected 3 fields");
        auto name = normalize_name(fields[0]);
        if (name.empty()) throw ParseError(source, line_no, "empty name");
        const NameCounts counts{parse_count(fields[1], source, line_no),
                                parse_count(fields[2], source, line_no)};
        if (!out.emplace(name, counts).second) {
            throw DuplicateNameError(source + ":" + std::to_string(line_no) + ": duplicate name '" +
                                     name + "'");
        }
    }
    return out;
}

void write_name_counts(std::ostream& out, const NameCountMap& counts)
{
    out << "name,white_count,black_count\n";
    for (const auto& [name, c] : counts) out << name << ',' << c.white << ',' << c.black << '\n';
}

PopulationTotals read_totals(std::istream& in, const std::string& source)
{
    PopulationTotals totals;
    bool have_white = false, have_black = false;
    std::string line;
    std::size_t line_no = 0;
    while (csv::next_record(in, line, line_no)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, "expected key=value");
        const auto key = csv::trim(std::string_view(line).substr(0, eq));
        const auto value = csv::trim(std::string_view(line).substr(eq + 1));
        if (key == "m_white") {
            totals.white = parse_count(value, source, line_no);
            have_white = true;
        } else if (key == "m_black") {
            totals.black = parse_count(value, source, line_no);
            have_black = true;
        } else {
            throw ParseError(source, line_no, "unknown key '" + key + "'");
        }
    }
    if (!have_white || !have_black) {
        throw ParseError(source, line_no, "totals need both m_white and m_black");
    }
    return totals;
}

NameFrequencyTable load_frequency_tables(const std::filesystem::path& first_path,
                                         const std::filesystem::path& last_path,
                                         PopulationTotals totals)
{
    const auto load = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) throw Error("cannot open " + p.string());
        return read_name_counts(in, p.string());
    };
    return NameFrequencyTable(load(first_path), load(last_path), totals);
}

NameOdds race_probability(const NameFrequencyTable& table, std::string_view first,
                          std::string_view last, OddsOptions options)
{
    const NameCounts* f = table.find_first(first);
    if (!f) throw UnknownNameError("unknown first name '" + std::string(first) + "'");
    const NameCounts* l = table.find_last(last);
    if (!l) throw UnknownNameError("unknown last name '" + std::string(last) + "'");

    const double extra = options.add_one_smoothing ? 1.0 : 0.0;
    const auto mw = static_cast<double>(table.totals().white);
    const auto mb = static_cast<double>(table.totals().black);
    const double m = mw + mb;
    const double white = ((static_cast<double>(f->white) + extra) / mw) *
                         ((static_cast<double>(l->white) + extra) / mw) * (mw / m);
    const double black = ((static_cast<double>(f->black) + extra) / mb) *
                         ((static_cast<double>(l->black) + extra) / mb) * (mb / m);
    if (white + black == 0.0) {
        throw UndefinedOddsError("no white or black population carries the name '" +
                                 std::string(first) + " " + std::string(last) + "'");
    }
    NameOdds odds;
    odds.first = std::string(first);
    odds.last = std::string(last);
    odds.prob_white = white / (white + black);
    odds.prob_black = black / (white + black);
    return odds;
}

PanelSelection assign_panel(std::vector<ScoredCandidate> scored, std::span<const double> targets)
{
    const std::size_t m = targets.size();
    const std::size_t n = scored.size();
    if (n < m) {
        throw DomainError("only " + std::to_string(n) + " scoreable candidates for " +
                          std::to_string(m) + " targets");
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        return std::tie(x.level, x.first, x.last) < std::tie(y.level, y.first, y.last);
    });
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return targets[x] < targets[y]; });

    // With absolute-deviation cost some optimal matching preserves order, so
    // an order-preserving DP over (sorted targets, sorted candidates) is exact.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cost(m + 1, std::vector<double>(n + 1, inf));
    for (std::size_t j = 0; j <= n; ++j) cost[0][j] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = i; j <= n; ++j) {
            const double take = cost[i - 1][j - 1] + std::abs(targets[order[i - 1]] - scored[j - 1].level);
            cost[i][j] = std::min(cost[i][j - 1], take);
        }
    }

    PanelSelection sel;
    sel.chosen.resize(m);
    std::size_t j = n;
    for (std::size_t i = m; i > 0; --i) {
        // Prefer the earlier candidate on ties.
        while (j > i && cost[i][j - 1] <= cost[i][j]) --j;
        const auto& c = scored[j - 1];
        const double t = targets[order[i - 1]];
        sel.chosen[order[i - 1]] = {c.first, c.last, t, c.level};
        --j;
    }
    for (const auto& c : sel.chosen) sel.total_deviation += std::abs(c.achieved - c.target);
    return sel;
}

PanelSelection select_name_panel(std::span<const std::pair<std::string, std::string>> candidates,
                                 const NameFrequencyTable& table, std::span<const double> targets,
                                 OddsOptions options)
{
    std::vector<ScoredCandidate> scored;
    std::vector<std::string> warnings;
    for (const auto& [first, last] : candidates) {
        try {
            const auto odds = race_probability(table, first, last, options);
            scored.push_back({first, last, odds.race_level()});
        } catch (const UnknownNameError& e) {
            warnings.push_back(std::string("skipped: ") + e.what());
        } catch (const UndefinedOddsError& e) {
            warnings.push_back(std::string("skipped: ") + e.what());
        }
    }
    auto sel = assign_panel(std::move(scored), targets);
    sel.warnings = std::move(warnings);
    return sel;
}

}  // namespace racecurve
