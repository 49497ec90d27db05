#include "sfksd/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sfksd {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::vector<std::string>> split_csv(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

SampleMatrix parse_sample_csv(const std::string &text) {
    const auto rows = split_csv(text);
    if (rows.empty()) throw CsvError("no data rows", -1);
    const auto d = rows.front().size();
    SampleMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto row = static_cast<std::ptrdiff_t>(r);
        if (rows[r].size() != d)
            throw CsvError("expected " + std::to_string(d) + " fields, got " + std::to_string(rows[r].size()), row);
        for (std::size_t c = 0; c < d; ++c) {
            const std::string &field = rows[r][c];
            if (field.empty()) throw CsvError("empty field " + std::to_string(c), row);
            char *end = nullptr;
            errno = 0;
            const double v = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size() || errno == ERANGE || !std::isfinite(v))
                throw CsvError("not a finite number: '" + field + "'", row);
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return out;
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

SampleMatrix read_sample_csv(const std::string &path) { return parse_sample_csv(read_text_file(path)); }

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string emit_sample_csv(const SampleMatrix &samples) {
    std::string out;
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        for (Eigen::Index c = 0; c < samples.cols(); ++c) {
            if (c) out += ',';
            out += format_double(samples(r, c));
        }
        out += '\n';
    }
    return out;
}

}  // namespace sfksd
