#include <racecurve/types.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <racecurve/errors.hpp>

namespace racecurve {

std::string_view to_string(Direction d)
{
    switch (d) {
        case Direction::Increasing: return "increasing";
        case Direction::Decreasing: return "decreasing";
        case Direction::Flat: return "flat";
    }
    return "flat";
}

Direction parse_direction(std::string_view text)
{
    if (text == "increasing") return Direction::Increasing;
    if (text == "decreasing") return Direction::Decreasing;
    if (text == "flat") return Direction::Flat;
    throw DomainError("unknown direction '" + std::string(text) + "'");
}

RaceLevel::RaceLevel(double value) : value_(value)
{
    if (!(value > 0.0 && value < 1.0)) {
        throw DomainError("race level must lie in (0, 1), got " + std::to_string(value));
    }
}

void CurveParams::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
}

Direction CurveParams::direction() const noexcept
{
    if (alpha < beta) return Direction::Increasing;
    if (alpha > beta) return Direction::Decreasing;
    return Direction::Flat;
}

void WorkingParams::validate() const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
    if (direction == Direction::Flat) {
        if (!(flat_level > 0.0 && flat_level < 1.0)) {
            throw DomainError("flat response level must lie in (0, 1)");
        }
        return;
    }
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("working parameter a must be positive");
    if (!(b > 1.0) || !std::isfinite(b)) throw DomainError("working parameter b must exceed 1");
}

void Dataset::add(double xi, int y)
{
    if (y != 0 && y != 1) throw DomainError("outcome must be 0 or 1");
    obs_.push_back({RaceLevel{xi}, y});
    if (!blocks_.empty()) blocks_.emplace_back();
}

void Dataset::add(double xi, int y, std::string block)
{
    if (y != 0 && y != 1) throw DomainError("outcome must be 0 or 1");
    if (blocks_.size() < obs_.size()) blocks_.resize(obs_.size());
    obs_.push_back({RaceLevel{xi}, y});
    blocks_.push_back(std::move(block));
}

LevelTable Dataset::levels() const
{
    std::map<double, LevelCount> by_level;
    for (const auto& o : obs_) {
        auto& c = by_level.try_emplace(o.xi.value(), LevelCount{o.xi.value(), 0, 0}).first->second;
        ++c.n;
        c.responses += static_cast<std::size_t>(o.y);
    }
    LevelTable out;
    out.reserve(by_level.size());
    for (const auto& [xi, c] : by_level) out.push_back(c);
    return out;
}

Dataset Dataset::block_subset(std::string_view block) const
{
    Dataset out;
    for (std::size_t i = 0; i < obs_.size(); ++i) {
        if (has_blocks() && blocks_[i] == block) {
            out.add(obs_[i].xi.value(), obs_[i].y, blocks_[i]);
        }
    }
    return out;
}

std::size_t total_units(const LevelTable& table) noexcept
{
    std::size_t n = 0;
    for (const auto& c : table) n += c.n;
    return n;
}

}  // namespace racecurve
