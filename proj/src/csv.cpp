#include "aerq/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "aerq/error.hpp"

namespace aerq {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << source << ": line " << line << ": " << what;
    throw InputError(msg.str());
}

} // namespace

Dataset read_csv(std::istream& in, const std::string& source, SizeMode mode) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::vector<double> values;
    std::size_t rows = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;

        auto fields = split_fields(line);
        if (header.empty()) {
            for (auto& f : fields) header.push_back(trim(f));
            if (header.front() != "y") fail(source, line_no, "missing column 'y' (must be first)");
            for (std::size_t j = 1; j < header.size(); ++j) {
                const std::string want = "x" + std::to_string(j);
                if (header[j] != want) {
                    fail(source, line_no, "missing column '" + want + "' (found '" + header[j] + "')");
                }
            }
            continue;
        }
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "expected " << header.size() << " fields, found " << fields.size();
            fail(source, line_no, msg.str());
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string cell = trim(fields[j]);
            double v = 0.0;
            const char* first = cell.data();
            const char* last = first + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (cell.empty() || ec != std::errc() || ptr != last) {
                fail(source, line_no,
                     "column " + std::to_string(j + 1) + " ('" + header[j] + "'): cannot parse '" +
                         cell + "' as a number");
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (header.empty()) throw InputError(source + ": empty file (header row required)");

    const auto n = static_cast<Index>(rows);
    const auto p = static_cast<Index>(header.size() - 1);
    Vector y(n);
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i) {
        const auto base = static_cast<std::size_t>(i) * header.size();
        y(i) = values[base];
        for (Index j = 0; j < p; ++j) x(i, j) = values[base + 1 + static_cast<std::size_t>(j)];
    }
    return validate_dataset(std::move(y), std::move(x), mode);
}

Dataset load_csv(const std::filesystem::path& path, SizeMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return read_csv(in, path.string(), mode);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << "y";
    for (Index j = 1; j <= data.p(); ++j) out << ",x" << j;
    out << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        out << format_double(data.y()(i));
        for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x()(i, j));
        out << '\n';
    }
}

} // namespace aerq
