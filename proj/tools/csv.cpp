#include "csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace phonon::cli {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::string>& preamble)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (const auto& line : preamble) out_ << "# " << line << '\n';
    for (std::size_t q = 0; q < header.size(); ++q) out_ << (q ? "," : "") << header[q];
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t q = 0; q < values.size(); ++q) out_ << (q ? "," : "") << format_number(values[q]);
    out_ << '\n';
}

void CsvWriter::row(const std::string& label, std::span<const double> values) {
    out_ << label;
    for (double v : values) out_ << ',' << format_number(v);
    out_ << '\n';
}

}  // namespace phonon::cli
