#include "fpflux/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fpflux {

void atomic_write(const std::string &path, const std::string &content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ResourceError("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) throw ResourceError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw ResourceError("cannot rename onto " + path + ": " + ec.message());
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw InputError("CSV header must not be empty");
}

CsvTable &CsvTable::row(std::vector<std::string> fields) {
    if (fields.size() != header_.size())
        throw InputError("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(header_.size()));
    rows_.push_back(std::move(fields));
    return *this;
}

CsvTable &CsvTable::row_values(const std::vector<double> &values) {
    std::vector<std::string> f;
    f.reserve(values.size());
    for (double v : values) f.push_back(format_double(v));
    return row(std::move(f));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string> &fs) {
        for (size_t i = 0; i < fs.size(); ++i) {
            if (i) out += ',';
            out += csv_field(fs[i]);
        }
        out += "\r\n";
    };
    line(header_);
    for (const auto &r : rows_) line(r);
    return out;
}

std::string matrix_market(const Mat &m, double drop) {
    std::ostringstream body;
    long nnz = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > drop || (drop == 0.0 && m(i, j) != 0.0)) {
                body << i + 1 << ' ' << j + 1 << ' ' << format_double(m(i, j)) << '\n';
                ++nnz;
            }
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate real general\n" << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n'
       << body.str();
    return os.str();
}

std::string matrix_market(const CMat &m, double drop) {
    std::ostringstream body;
    long nnz = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > drop || (drop == 0.0 && m(i, j) != 0.0)) {
                body << i + 1 << ' ' << j + 1 << ' ' << format_double(m(i, j).real()) << ' '
                     << format_double(m(i, j).imag()) << '\n';
                ++nnz;
            }
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate complex general\n" << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n'
       << body.str();
    return os.str();
}

Mat parse_matrix_market_real(const std::string &text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
        throw InputError("not a real coordinate MatrixMarket file");
    do {
        if (!std::getline(is, line)) throw InputError("MatrixMarket size line missing");
    } while (!line.empty() && line[0] == '%');
    long r, c, nnz;
    std::istringstream sz(line);
    if (!(sz >> r >> c >> nnz) || r < 0 || c < 0 || nnz < 0) throw InputError("malformed MatrixMarket size line");
    Mat m = Mat::Zero(r, c);
    for (long k = 0; k < nnz; ++k) {
        long i, j;
        double v;
        if (!(is >> i >> j >> v) || i < 1 || i > r || j < 1 || j > c)
            throw InputError("malformed MatrixMarket entry " + std::to_string(k + 1));
        m(i - 1, j - 1) = v;
    }
    return m;
}

}  // namespace fpflux
