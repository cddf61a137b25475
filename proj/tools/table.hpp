#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace racecurve::cli {

enum class Format { Csv, Json };

/// Rows of typed cells. CSV and JSON renderings carry the same content: JSON
/// is an array of objects keyed by column name.
class Table {
   public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<nlohmann::ordered_json> row);
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<nlohmann::ordered_json>>& rows() const noexcept { return rows_; }

    void write(std::ostream& out, Format format) const;

   private:
    std::vector<std::string> columns_;
    std::vector<std::vector<nlohmann::ordered_json>> rows_;
};

std::string cell_text(const nlohmann::ordered_json& cell);

}  // namespace racecurve::cli
