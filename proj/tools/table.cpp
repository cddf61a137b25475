#include "table.hpp"

#include <ostream>
#include <stdexcept>

#include <racecurve/csv.hpp>

namespace racecurve::cli {

void Table::add(std::vector<nlohmann::ordered_json> row)
{
    if (row.size() != columns_.size()) throw std::logic_error("row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string cell_text(const nlohmann::ordered_json& cell)
{
    switch (cell.type()) {
        case nlohmann::ordered_json::value_t::null:
            return "";
        case nlohmann::ordered_json::value_t::number_float:
            return csv::format_double(cell.get<double>());
        case nlohmann::ordered_json::value_t::string:
            return cell.get<std::string>();
        default:
            return cell.dump();
    }
}

void Table::write(std::ostream& out, Format format) const
{
    if (format == Format::Json) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : rows_) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = row[i];
            arr.push_back(std::move(obj));
        }
        out << arr.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

}  // namespace racecurve::cli
