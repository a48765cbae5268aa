#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

// CSV output in full-precision scientific notation with LF line endings, so
// identical runs produce byte-identical files; plus a small reader for
// calibration inputs.

namespace modmirror::csv {

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& headers);
    void row(std::span<const double> values);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
};

struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(const std::string& header) const;
};

Table read_table(const std::string& path);

} // namespace modmirror::csv
