#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dynlab {

/// Decimal with 17 significant digits; round-trips every finite double.
std::string format_real(double v);

/// Shortest decimal that round-trips (used for s-expression constants).
std::string format_shortest(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& columns);
    void row(std::span<const double> values);

private:
    std::ostream& os_;
};

} // namespace dynlab
