#pragma once
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace racecurve {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

enum class Direction { Increasing, Decreasing, Flat };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// Probability that a receiver identifies a sender's name as Black.
/// Always strictly inside (0, 1).
class RaceLevel {
   public:
    explicit RaceLevel(double value);
    double value() const noexcept { return value_; }

   private:
    double value_;
};

/// Natural parameters of the response curve: limits at 0+ and 1- plus the
/// shape of the weighting function.
struct CurveParams {
    double alpha = 0.5;
    double beta = 0.5;
    double gamma = 1.0;

    void validate() const;
    Direction direction() const noexcept;
};

/// Working parameterisation (a, b, gamma) in which the likelihood is fitted.
/// For the Flat direction only `flat_level` is meaningful.
struct WorkingParams {
    double a = 0.0;
    double b = 0.0;
    double gamma = 1.0;
    Direction direction = Direction::Flat;
    double flat_level = 0.5;

    void validate() const;
};

struct Observation {
    RaceLevel xi;
    int y;
};

/// Sufficient statistics at one distinct race level.
struct LevelCount {
    double xi;
    std::size_t n;
    std::size_t responses;
};

using LevelTable = std::vector<LevelCount>;

class Dataset {
   public:
    Dataset() = default;

    void add(double xi, int y);
    void add(double xi, int y, std::string block);

    std::span<const Observation> observations() const noexcept { return obs_; }
    const std::vector<std::string>& blocks() const noexcept { return blocks_; }
    bool has_blocks() const noexcept { return !blocks_.empty(); }
    std::size_t size() const noexcept { return obs_.size(); }
    bool empty() const noexcept { return obs_.empty(); }

    // Distinct levels in increasing order with counts and response totals.
    LevelTable levels() const;

    Dataset block_subset(std::string_view block) const;

   private:
    std::vector<Observation> obs_;
    std::vector<std::string> blocks_;
};

std::size_t total_units(const LevelTable& table) noexcept;

}  // namespace racecurve
