#include "pmeflow/fieldio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pmeflow {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_field(std::ostream& os, const ScalarField& f, double t,
                 const std::optional<std::string>& kind, std::optional<bool> has_f) {
    const GridSpec& g = f.grid();
    os << g.dim << ' ' << g.n[0];
    if (g.dim == 2) os << ' ' << g.n[1];
    os << ' ' << format_double(g.length[0]);
    if (g.dim == 2) os << ' ' << format_double(g.length[1]);
    os << ' ' << format_double(t);
    if (kind) os << ' ' << *kind;
    if (has_f) os << ' ' << (*has_f ? 1 : 0);
    os << '\n';
    for (int i = 0; i < f.size(); ++i) os << format_double(f[i]) << '\n';
}

void write_field_file(const std::string& path, const ScalarField& f, double t,
                      const std::optional<std::string>& kind, std::optional<bool> has_f) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    write_field(os, f, t, kind, has_f);
}

FieldFile read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ConfigError("field file: missing header");
    std::istringstream hs(header);
    int dim = 0;
    if (!(hs >> dim) || (dim != 1 && dim != 2))
        throw ConfigError("field file: bad dimension in header");
    int n0 = 0, n1 = 1;
    double L0 = 0, L1 = 1, t = 0;
    hs >> n0;
    if (dim == 2) hs >> n1;
    hs >> L0;
    if (dim == 2) hs >> L1;
    if (!(hs >> t)) throw ConfigError("field file: truncated header");

    FieldFile out;
    out.grid = dim == 1 ? GridSpec::circle(n0, L0) : GridSpec::torus(n0, n1, L0, L1);
    out.t = t;
    std::string kind;
    if (hs >> kind) {
        out.kind = kind;
        int flag;
        if (hs >> flag) out.has_f = flag != 0;
    }

    int count = out.grid.node_count();
    out.values.reserve(static_cast<size_t>(count));
    std::string line;
    while (static_cast<int>(out.values.size()) < count && std::getline(is, line)) {
        if (line.empty()) continue;
        out.values.push_back(std::stod(line));
    }
    if (static_cast<int>(out.values.size()) != count)
        throw ConfigError("field file: value count does not match the grid");
    return out;
}

FieldFile read_field_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open: " + path);
    return read_field(is);
}

struct CsvWriter::Impl {
    std::ofstream os;
    size_t ncol;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : impl_(new Impl{std::ofstream(path), columns.size()}) {
    if (!impl_->os) throw ConfigError("cannot open for writing: " + path);
    for (size_t i = 0; i < columns.size(); ++i)
        impl_->os << (i ? "," : "") << columns[i];
    impl_->os << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->ncol) throw ConfigError("csv row width mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        impl_->os << (i ? "," : "") << format_double(values[i]);
    impl_->os << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != impl_->ncol) throw ConfigError("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
        impl_->os << (i ? "," : "") << cells[i];
    impl_->os << '\n';
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.columns = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.columns.size())
                throw ConfigError("csv row width mismatch in " + path);
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

} // namespace pmeflow
