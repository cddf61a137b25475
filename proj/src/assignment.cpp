#include <racecurve/assignment.hpp>

#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <racecurve/csv.hpp>
#include <racecurve/errors.hpp>
#include <racecurve/rng.hpp>

namespace racecurve {

std::string_view to_string(Gender g)
{
    return g == Gender::Female ? "Female" : "Male";
}

std::string_view to_string(Race r)
{
    return r == Race::Black ? "Black" : "White";
}

Gender parse_gender(std::string_view text)
{
    const auto t = csv::lower(csv::trim(text));
    if (t == "female" || t == "f") return Gender::Female;
    if (t == "male" || t == "m") return Gender::Male;
    throw DomainError("unknown gender '" + std::string(text) + "'");
}

Race parse_race(std::string_view text)
{
    const auto t = csv::lower(csv::trim(text));
    if (t == "black" || t == "b") return Race::Black;
    if (t == "white" || t == "w") return Race::White;
    throw DomainError("unknown race '" + std::string(text) + "'");
}

std::string BlockKey::label() const
{
    return practice_area + "/" + std::string(to_string(gender)) + "/" + std::string(to_string(race));
}

Blocks block_units(std::span<const Unit> roster)
{
    Blocks blocks;
    for (const auto& u : roster) blocks[{u.practice_area, u.gender, u.race}].push_back(u);
    return blocks;
}

std::vector<Unit> deduplicate_roster(std::span<const Unit> roster)
{
    std::set<std::string> seen;
    std::vector<Unit> out;
    for (const auto& u : roster) {
        if (seen.insert(u.id).second) out.push_back(u);
    }
    return out;
}

AssignmentPlan randomize(const Blocks& blocks, std::span<const PanelEntry> female_panel,
                         std::span<const PanelEntry> male_panel, std::uint64_t seed,
                         RandomizeOptions options)
{
    for (const auto panel : {female_panel, male_panel}) {
        if (panel.empty()) throw PanelSizeError("sender panels cannot be empty");
        if (!options.allow_other_panel_size && panel.size() != options.panel_size) {
            throw PanelSizeError("sender panels need exactly " + std::to_string(options.panel_size) +
                                 " names, got " + std::to_string(panel.size()));
        }
    }
    std::set<std::string> ids;
    for (const auto& [key, units] : blocks) {
        for (const auto& u : units) {
            if (!ids.insert(u.id).second) throw DomainError("duplicate unit id '" + u.id + "'");
        }
    }

    AssignmentPlan plan;
    plan.seed = seed;
    RandomStream rng(seed);
    for (const auto& [key, units] : blocks) {
        std::vector<std::size_t> order(units.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(std::span(order));

        std::size_t n_female = units.size() / 2;
        if (units.size() % 2 == 1) n_female += static_cast<std::size_t>(rng.below(2));

        std::vector<AssignmentRow> rows(units.size());
        const auto deal = [&](std::size_t begin, std::size_t end, Gender g,
                              std::span<const PanelEntry> panel) {
            std::vector<std::size_t> names(panel.size());
            for (std::size_t i = 0; i < names.size(); ++i) names[i] = i;
            rng.shuffle(std::span(names));
            for (std::size_t pos = begin; pos < end; ++pos) {
                const auto& entry = panel[names[(pos - begin) % names.size()]];
                const auto& unit = units[order[pos]];
                rows[order[pos]] = {unit.id, key, g, entry.name, entry.race_level};
            }
        };
        deal(0, n_female, Gender::Female, female_panel);
        deal(n_female, units.size(), Gender::Male, male_panel);
        for (auto& r : rows) plan.rows.push_back(std::move(r));
    }
    return plan;
}

std::vector<Unit> read_roster(std::istream& in, const std::string& source)
{
    std::vector<Unit> roster;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return roster;
    if (csv::split(line) != std::vector<std::string>{"id", "practice_area", "gender", "race"}) {
        throw ParseError(source, line_no, "expected header 'id,practice_area,gender,race'");
    }
    while (csv::next_record(in, line, line_no)) {
        const auto f = csv::split(line);
        if (f.size() != 4) throw ParseError(source, line_no, "expected 4 fields");
        if (f[0].empty() || f[1].empty()) throw ParseError(source, line_no, "empty id or practice area");
        try {
            roster.push_back({f[0], f[1], parse_gender(f[2]), parse_race(f[3])});
        } catch (const DomainError& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return roster;
}

void write_roster(std::ostream& out, std::span<const Unit> roster)
{
    out << "id,practice_area,gender,race\n";
    for (const auto& u : roster) {
        out << u.id << ',' << u.practice_area << ',' << to_string(u.gender) << ',' << to_string(u.race)
            << '\n';
    }
}

std::vector<PanelEntry> read_panel(std::istream& in, const std::string& source)
{
    std::vector<PanelEntry> panel;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return panel;
    if (csv::split(line) != std::vector<std::string>{"name", "race_level"}) {
        throw ParseError(source, line_no, "expected header 'name,race_level'");
    }
    while (csv::next_record(in, line, line_no)) {
        const auto f = csv::split(line);
        if (f.size() != 2) throw ParseError(source, line_no, "expected 2 fields");
        const double level = csv::parse_double(f[1], source, line_no);
        if (!(level > 0.0 && level < 1.0)) throw ParseError(source, line_no, "race level outside (0, 1)");
        panel.push_back({f[0], level});
    }
    return panel;
}

void write_plan(std::ostream& out, const AssignmentPlan& plan)
{
    out << "id,block,sender_gender,sender_name,race_level,seed\n";
    for (const auto& r : plan.rows) {
        out << r.unit_id << ',' << r.block.label() << ',' << to_string(r.sender_gender) << ','
            << r.sender_name << ',' << csv::format_double(r.race_level) << ',' << plan.seed << '\n';
    }
}

AssignmentPlan read_plan(std::istream& in, const std::string& source)
{
    AssignmentPlan plan;
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_record(in, line, line_no)) return plan;
    if (csv::split(line) !=
        std::vector<std::string>{"id", "block", "sender_gender", "sender_name", "race_level", "seed"}) {
        throw ParseError(source, line_no,
                         "expected header 'id,block,sender_gender,sender_name,race_level,seed'");
    }
    while (csv::next_record(in, line, line_no)) {
        const auto f = csv::split(line);
        if (f.size() != 6) throw ParseError(source, line_no, "expected 6 fields");
        AssignmentRow row;
        row.unit_id = f[0];
        const auto s1 = f[1].find('/');
        const auto s2 = f[1].rfind('/');
        if (s1 == std::string::npos || s1 == s2) throw ParseError(source, line_no, "malformed block");
        try {
            row.block = {f[1].substr(0, s1), parse_gender(f[1].substr(s1 + 1, s2 - s1 - 1)),
                         parse_race(f[1].substr(s2 + 1))};
            row.sender_gender = parse_gender(f[2]);
        } catch (const DomainError& e) {
            throw ParseError(source, line_no, e.what());
        }
        row.sender_name = f[3];
        row.race_level = csv::parse_double(f[4], source, line_no);
        plan.seed = csv::parse_uint(f[5], source, line_no);
        plan.rows.push_back(std::move(row));
    }
    return plan;
}

}  // namespace racecurve
