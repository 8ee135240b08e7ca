#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spinlink/errors.hpp"
#include "spinlink/numformat.hpp"

namespace spinlink {

// RFC-4180-compatible CSV emission: header row always present, LF line
// endings, UTF-8, numbers formatted via format_sig12.
class CsvFile {
public:
    CsvFile(const std::filesystem::path& path,
            const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_)
            throw IoError("cannot open '" + path.string() + "' for writing");
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) { write_cells(cells); }

    // Convenience for all-numeric rows.
    void row_values(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_sig12(v));
        write_cells(cells);
    }

    static std::string escape(const std::string& cell) {
        if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
        std::string quoted = "\"";
        for (char c : cell) {
            quoted += c;
            if (c == '"') quoted += '"';
        }
        quoted += '"';
        return quoted;
    }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << escape(cells[i]);
        }
        out_ << '\n';
        if (!out_) throw IoError("write failure on CSV stream");
    }

    std::ofstream out_;
};

} // namespace spinlink
