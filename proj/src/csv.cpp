#include "modmirror/csv.hpp"

#include <cstdio>
#include <sstream>

#include "modmirror/errors.hpp"

namespace modmirror::csv {

Writer::Writer(const std::string& path, const std::vector<std::string>& headers)
    : path_(path), out_(path, std::ios::binary), columns_(headers.size()) {
    if (!out_)
        throw Error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < headers.size(); ++i)
        out_ << (i ? "," : "") << headers[i];
    out_ << '\n';
}

void Writer::row(std::span<const double> values) {
    if (values.size() != columns_)
        throw Error("row width differs from the header in " + path_);
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17e", values[i]);
        out_ << (i ? "," : "") << buf;
    }
    out_ << '\n';
    if (!out_)
        throw Error("write failed on " + path_);
}

const std::vector<double>& Table::column(const std::string& header) const {
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (headers[i] == header)
            return columns[i];
    throw Error("CSV column '" + header + "' not found");
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line))
        throw Error(path + " is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ','))
        table.headers.push_back(cell);
    table.columns.resize(table.headers.size());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::stringstream row(line);
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            if (col >= table.columns.size())
                throw Error(path + ": too many columns on line " + std::to_string(line_no));
            try {
                table.columns[col].push_back(std::stod(cell));
            } catch (...) {
                throw Error(path + ": bad number '" + cell + "' on line " +
                            std::to_string(line_no));
            }
            ++col;
        }
        if (col != table.columns.size())
            throw Error(path + ": short row on line " + std::to_string(line_no));
    }
    return table;
}

} // namespace modmirror::csv
