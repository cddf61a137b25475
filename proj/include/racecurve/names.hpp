#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace racecurve {

struct NameCounts {
    std::uint64_t white = 0;
    std::uint64_t black = 0;
};

struct PopulationTotals {
    std::uint64_t white = 0;
    std::uint64_t black = 0;
};

using NameCountMap = std::map<std::string, NameCounts>;

/// First- and last-name counts by race with the population totals they were
/// drawn from. Keys are lowercased and trimmed.
class NameFrequencyTable {
   public:
    NameFrequencyTable(NameCountMap first_names, NameCountMap last_names, PopulationTotals totals);

    const NameCountMap& first_names() const noexcept { return first_; }
    const NameCountMap& last_names() const noexcept { return last_; }
    const PopulationTotals& totals() const noexcept { return totals_; }

    const NameCounts* find_first(std::string_view name) const;
    const NameCounts* find_last(std::string_view name) const;

   private:
    NameCountMap first_;
    NameCountMap last_;
    PopulationTotals totals_;
};

std::string normalize_name(std::string_view name);

/// Parses "name,white_count,black_count" with a header row. An empty input is
/// an empty map.
NameCountMap read_name_counts(std::istream& in, const std::string& source = "<input>");
void write_name_counts(std::ostream& out, const NameCountMap& counts);

/// Two lines "m_white=<int>" and "m_black=<int>".
PopulationTotals read_totals(std::istream& in, const std::string& source = "<input>");

NameFrequencyTable load_frequency_tables(const std::filesystem::path& first_path,
                                         const std::filesystem::path& last_path,
                                         PopulationTotals totals);

struct NameOdds {
    std::string first;
    std::string last;
    double prob_white = 0.0;
    double prob_black = 0.0;

    // Race level is the probability of being read as Black.
    double race_level() const noexcept { return prob_black; }
};

struct OddsOptions {
    bool add_one_smoothing = false;
};

/// Naive-Bayes probability that a person with this first and last name is
/// white, assuming first and last names are assigned independently.
NameOdds race_probability(const NameFrequencyTable& table, std::string_view first,
                          std::string_view last, OddsOptions options = {});

struct PanelChoice {
    std::string first;
    std::string last;
    double target = 0.0;
    double achieved = 0.0;
};

struct PanelSelection {
    std::vector<PanelChoice> chosen;  // one per target, in target order
    double total_deviation = 0.0;
    std::vector<std::string> warnings;
};

/// Picks one distinct candidate per target race level minimising the total
/// absolute deviation. Candidates that cannot be scored are skipped with a
/// warning.
PanelSelection select_name_panel(std::span<const std::pair<std::string, std::string>> candidates,
                                 const NameFrequencyTable& table, std::span<const double> targets,
                                 OddsOptions options = {});

struct ScoredCandidate {
    std::string first;
    std::string last;
    double level;
};

/// Assignment core on pre-scored candidates.
PanelSelection assign_panel(std::vector<ScoredCandidate> scored, std::span<const double> targets);

}  // namespace racecurve
