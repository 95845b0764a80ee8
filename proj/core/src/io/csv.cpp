#include "ocq/io/csv.hpp"

#include <charconv>
#include <sstream>

#include "ocq/error.hpp"
#include "ocq/io/digest.hpp"

namespace ocq::io {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view scenario_hash,
                     std::vector<std::pair<std::string, std::string>> metadata, std::vector<std::string> columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
    if (!out_) throw UsageError("cannot write " + path.string());
    out_ << "# scenario_hash: " << scenario_hash << '\n';
    for (const auto& [key, value] : metadata) out_ << "# " << key << ": " << value << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("csv row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw NumericalError("write to " + path_.string() + " failed");
    out_.close();
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.starts_with("# ")) {
            const auto colon = line.find(": ");
            if (colon != std::string::npos) table.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            table.columns = std::move(cells);
            header = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || end != c.data() + c.size()) throw UsageError("bad number '" + c + "' in " + path.string());
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace ocq::io
