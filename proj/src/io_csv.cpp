#include <charconv>
#include <fstream>
#include <sstream>

#include "tvc/io.hpp"

namespace tvc {

namespace {

bool parse_double(const std::string& cell, double* out) {
    size_t b = 0, e = cell.size();
    while (b < e && (cell[b] == ' ' || cell[b] == '\t' || cell[b] == '\r')) ++b;
    while (e > b && (cell[e - 1] == ' ' || cell[e - 1] == '\t' || cell[e - 1] == '\r')) --e;
    if (b == e) return false;
    const char* first = cell.data() + b;
    const char* last = cell.data() + e;
    auto res = std::from_chars(first, last, *out);
    return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

std::vector<TimeSeries> load_series_csv(const std::string& path, int column) {
    std::ifstream in(path);
    require(in.good(), Err::EmptyFile, "cannot open " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    require(!lines.empty(), Err::EmptyFile, path + " has no rows");

    size_t start = 0;
    {
        // header iff every cell of the first row fails numeric parsing
        const auto cells = split_csv(lines[0]);
        bool any_numeric = false;
        double v;
        for (const auto& c : cells)
            if (parse_double(c, &v)) any_numeric = true;
        if (!any_numeric) start = 1;
    }
    require(start < lines.size(), Err::EmptyFile, path + " has a header but no data");

    const size_t cols = split_csv(lines[start]).size();
    std::vector<std::vector<double>> columns(cols);
    for (size_t r = start; r < lines.size(); ++r) {
        const auto cells = split_csv(lines[r]);
        if (cells.size() != cols) {
            std::ostringstream msg;
            msg << path << ": row " << (r + 1) << " has " << cells.size() << " cells, expected "
                << cols;
            fail(Err::ParseError, msg.str());
        }
        for (size_t c = 0; c < cols; ++c) {
            double v;
            if (!parse_double(cells[c], &v)) {
                std::ostringstream msg;
                msg << path << ": row " << (r + 1) << ", col " << (c + 1) << ": cannot parse '"
                    << cells[c] << "'";
                fail(Err::ParseError, msg.str());
            }
            columns[c].push_back(v);
        }
    }

    std::vector<TimeSeries> out;
    if (column < 0) {
        for (auto& col : columns) {
            TimeSeries s;
            s.values = std::move(col);
            out.push_back(std::move(s));
        }
    } else {
        require(column < int(cols), Err::ParseError, "requested column does not exist");
        TimeSeries s;
        s.values = std::move(columns[size_t(column)]);
        out.push_back(std::move(s));
    }
    return out;
}

void save_series_csv(const std::vector<TimeSeries>& series, const std::string& path) {
    require(!series.empty(), Err::EmptyCorpus, "nothing to save");
    const size_t len = series.front().values.size();
    for (const auto& s : series)
        require(s.values.size() == len, Err::LengthMismatch, "series lengths differ");

    std::ostringstream body;
    body.precision(17);
    for (size_t t = 0; t < len; ++t) {
        for (size_t c = 0; c < series.size(); ++c) {
            if (c) body << ',';
            body << series[c].values[t];
        }
        body << '\n';
    }
    write_text_file(path, body.str());
}

}  // namespace tvc
