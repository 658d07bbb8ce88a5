#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "vacmech/cli.hpp"

namespace vacmech::cli {
namespace {

std::string render_csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& row : t.rows) line(row);
    return out;
}

}  // namespace

std::string csv_cell(double x) {
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string render(const OutputRecord& record, Format format) {
    if (format == Format::Csv) return render_csv(record.table);
    return record.document.dump(2) + "\n";
}

void emit(const OutputRecord& record, Format format, const std::string& path) {
    const std::string text = render(record, format);
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw std::runtime_error("failed writing to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("failed writing output file " + path);
}

}  // namespace vacmech::cli
