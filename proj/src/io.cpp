#include "wbary/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "wbary/error.hpp"

namespace wbary {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return format_double(v);
}

std::string json_array(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(xs[i]);
    }
    out += ']';
    return out;
}

std::string json_array(const Eigen::VectorXd& xs) {
    return json_array(std::vector<double>(xs.data(), xs.data() + xs.size()));
}

std::string json_rows(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r > 0) out += ',';
        out += json_array(Eigen::VectorXd(m.row(r)));
    }
    out += ']';
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::string at_line(const std::string& source, int line_no) {
    return source + ":" + std::to_string(line_no) + ": ";
}

double parse_number(const std::string& tok, const std::string& source, int line_no) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    require(!tok.empty() && end == begin + tok.size(), "ParseError",
            at_line(source, line_no) + "bad number '" + tok + "'");
    return v;
}

} // namespace

Table parse_csv(const std::string& text, const std::string& source) {
    std::vector<std::pair<int, std::string>> lines;
    {
        std::istringstream in(text);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            lines.emplace_back(no, line);
        }
    }
    require(!lines.empty(), "ParseError", at_line(source, 1) + "empty file");

    Table t;
    const int header_no = lines.front().first;
    const std::vector<std::string> header = split_fields(lines.front().second);
    std::size_t first_value = 0;
    if (header.front() == "group") {
        t.has_group = true;
        first_value = 1;
    }
    require(header.size() > first_value, "ParseError", at_line(source, header_no) + "no value columns");
    for (std::size_t c = first_value; c < header.size(); ++c) {
        require(!header[c].empty(), "ParseError", at_line(source, header_no) + "empty column name");
        t.columns.push_back(header[c]);
    }
    require(lines.size() > 1, "ParseError", at_line(source, header_no) + "no data rows");

    const int rows = static_cast<int>(lines.size()) - 1;
    const int cols = static_cast<int>(t.columns.size());
    t.values.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const auto& [no, line] = lines[r + 1];
        const std::vector<std::string> fields = split_fields(line);
        require(fields.size() == header.size(), "ParseError",
                at_line(source, no) + "expected " + std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
        if (t.has_group) t.group.push_back(fields[0]);
        for (int c = 0; c < cols; ++c) {
            t.values(r, c) = parse_number(fields[first_value + c], source, no);
        }
    }
    return t;
}

Table read_table(const std::string& path) { return parse_csv(read_text(path), path); }

std::string format_table(const Table& table) {
    std::ostringstream out;
    if (table.has_group) out << "group";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (table.has_group || c > 0) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        if (table.has_group) out << table.group[r];
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
            if (table.has_group || c > 0) out << ',';
            out << format_double(table.values(r, c));
        }
        out << '\n';
    }
    return out.str();
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    require(!in.bad(), "IoError", "read failed on " + path);
    return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "IoError", "cannot open " + path + " for writing");
    out << text;
    out.flush();
    require(out.good(), "IoError", "write failed on " + path);
}

MeasureFile parse_measure_json(const std::string& text, const std::string& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail("ParseError", source + ": " + e.what());
    }
    try {
        require(doc.is_object(), "ParseError", source + ": expected a JSON object");
        require(doc.value("schema", 0) == 1, "ParseError", source + ": unsupported schema");
        const std::string kind = doc.value("kind", "");
        MeasureFile out;
        if (kind == "quantile_grid") {
            out.grid = make_quantile_grid(doc.at("values").get<std::vector<double>>());
        } else if (kind == "discrete") {
            const auto& pts = doc.at("points");
            require(pts.is_array() && !pts.empty(), "ParseError",
                    source + ": points must be a nonempty array");
            const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
            Eigen::MatrixXd points;
            Eigen::Index d = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto row = pts[i].get<std::vector<double>>();
                if (i == 0) {
                    d = static_cast<Eigen::Index>(row.size());
                    require(d >= 1, "ParseError", source + ": empty point");
                    points.resize(n, d);
                }
                require(static_cast<Eigen::Index>(row.size()) == d, "ParseError",
                        source + ": ragged points array");
                for (Eigen::Index c = 0; c < d; ++c) points(i, c) = row[c];
            }
            if (doc.contains("weights")) {
                const auto ws = doc.at("weights").get<std::vector<double>>();
                require(static_cast<Eigen::Index>(ws.size()) == n, "ParseError",
                        source + ": weights length mismatch");
                out.discrete = make_discrete(
                    std::move(points),
                    Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size())));
            } else {
                out.discrete = make_discrete(std::move(points));
            }
        } else {
            fail("ParseError", source + ": unknown kind '" + kind + "'");
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        fail("ParseError", source + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() == "ParseError") throw;
        fail("ParseError", source + ": " + e.what()); // invalid grid or weights in the file
    }
}

std::string quantile_grid_json(const QuantileGrid& grid) {
    return "{\"schema\":1,\"kind\":\"quantile_grid\",\"values\":" + json_array(grid.values) + "}\n";
}

std::string discrete_json(const DiscreteMeasure& mu) {
    return "{\"schema\":1,\"kind\":\"discrete\",\"points\":" + json_rows(mu.points()) +
           ",\"weights\":" + json_array(mu.weights()) + "}\n";
}

} // namespace wbary
