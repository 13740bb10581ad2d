#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace phonon::cli {

// Comma-separated output with LF endings and 17 significant digits.
class CsvWriter {
public:
    // Preamble lines are written as "# ..." before the header row.
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::string>& preamble = {});

    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
    void row(std::span<const double> values);
    // Leading text cell followed by numbers.
    void row(const std::string& label, std::span<const double> values);

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

std::string format_number(double v);

}  // namespace phonon::cli
