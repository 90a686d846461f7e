#pragma once

// Plain-text field snapshots: one header line
//   dim n0 [n1] L0 [L1] t [kind] [f]
// then one value per line in row-major (x outer) order. The two optional
// trailing header tokens mark flow snapshots: the flow kind name and a 0/1
// flag for the presence of the coupled map f. Doubles are printed with 17
// significant digits so snapshots round-trip bit-exactly.

#include <iosfwd>
#include <optional>
#include <string>

#include "pmeflow/grid.hpp"

namespace pmeflow {

struct FieldFile {
    GridSpec grid;
    std::vector<double> values;
    double t = 0.0;
    std::optional<std::string> kind;
    std::optional<bool> has_f;
};

void write_field(std::ostream& os, const ScalarField& f, double t,
                 const std::optional<std::string>& kind = std::nullopt,
                 std::optional<bool> has_f = std::nullopt);
void write_field_file(const std::string& path, const ScalarField& f, double t,
                      const std::optional<std::string>& kind = std::nullopt,
                      std::optional<bool> has_f = std::nullopt);

FieldFile read_field(std::istream& is);
FieldFile read_field_file(const std::string& path);

/// full-precision repeatable formatting used by every text artifact
std::string format_double(double x);

/// minimal CSV support: fixed column set, format_double cells
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);

private:
    struct Impl;
    Impl* impl_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

} // namespace pmeflow
