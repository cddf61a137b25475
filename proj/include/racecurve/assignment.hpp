#pragma once
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace racecurve {

enum class Gender { Female, Male };
enum class Race { Black, White };

std::string_view to_string(Gender g);
std::string_view to_string(Race r);
Gender parse_gender(std::string_view text);
Race parse_race(std::string_view text);

/// One experimental unit (receiver). Practice areas are free labels, e.g.
/// Criminal, Divorce, PersonalInjury.
struct Unit {
    std::string id;
    std::string practice_area;
    Gender gender = Gender::Female;
    Race race = Race::Black;
};

struct BlockKey {
    std::string practice_area;
    Gender gender = Gender::Female;
    Race race = Race::Black;

    auto operator<=>(const BlockKey&) const = default;
    std::string label() const;  // "Criminal/Female/Black"
};

using Blocks = std::map<BlockKey, std::vector<Unit>>;

Blocks block_units(std::span<const Unit> roster);

/// Drops repeated ids, keeping the first row (and so the first listed
/// practice area) of each unit.
std::vector<Unit> deduplicate_roster(std::span<const Unit> roster);

struct PanelEntry {
    std::string name;
    double race_level = 0.5;
};

struct AssignmentRow {
    std::string unit_id;
    BlockKey block;
    Gender sender_gender = Gender::Female;
    std::string sender_name;
    double race_level = 0.5;
};

struct AssignmentPlan {
    std::vector<AssignmentRow> rows;  // block order, roster order within a block
    std::uint64_t seed = 0;
};

struct RandomizeOptions {
    std::size_t panel_size = 6;
    bool allow_other_panel_size = false;
};

/// Within every block: shuffle, split into sender-gender halves (a seeded coin
/// decides which half takes an odd unit), then deal each half's names from a
/// shuffled balanced repetition of its panel.
AssignmentPlan randomize(const Blocks& blocks, std::span<const PanelEntry> female_panel,
                         std::span<const PanelEntry> male_panel, std::uint64_t seed,
                         RandomizeOptions options = {});

// CSV "id,practice_area,gender,race" with header.
std::vector<Unit> read_roster(std::istream& in, const std::string& source = "<roster>");
void write_roster(std::ostream& out, std::span<const Unit> roster);

// CSV "name,race_level" with header.
std::vector<PanelEntry> read_panel(std::istream& in, const std::string& source = "<panel>");

// CSV "id,block,sender_gender,sender_name,race_level,seed".
void write_plan(std::ostream& out, const AssignmentPlan& plan);
AssignmentPlan read_plan(std::istream& in, const std::string& source = "<plan>");

}  // namespace racecurve
