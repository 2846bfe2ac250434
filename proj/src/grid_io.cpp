#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlsinv/error.hpp"
#include "nlsinv/grid.hpp"

namespace nlsinv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("csv: bad number '" + std::string(s) + "'");
  return v;
}

long parse_long(std::string_view s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("csv: bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_header(std::ostream& os, const PolarGrid& g) {
  os << "# " << g.nr() << ',' << g.ntheta() << ',' << format_double(g.radius()) << '\n';
}

void write_row(std::ostream& os, int i, int j, cdouble z) {
  os << i << ',' << j << ',' << format_double(z.real()) << ',' << format_double(z.imag())
     << '\n';
}

PolarGrid read_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw FormatError("csv: missing '# Nr,Ntheta,R' header");
  auto f = split(std::string_view(line).substr(2));
  if (f.size() != 3) throw FormatError("csv: header needs Nr,Ntheta,R");
  return PolarGrid(static_cast<int>(parse_long(f[0])), static_cast<int>(parse_long(f[1])),
                   parse_double(f[2]));
}

struct Row {
  long i, j;
  cdouble z;
};

bool read_row(std::istream& is, Row& row) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != 4) throw FormatError("csv: expected i,j,re,im");
    row = {parse_long(f[0]), parse_long(f[1]), {parse_double(f[2]), parse_double(f[3])}};
    return true;
  }
  return false;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return is;
}

}  // namespace

void write_csv(std::ostream& os, const PolarField& field) {
  const PolarGrid& g = field.grid();
  write_header(os, g);
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.ntheta(); ++j) write_row(os, i + 1, j + 1, field(i, j));
}

void write_csv(std::ostream& os, const BoundaryTrace& trace) {
  const PolarGrid& g = trace.grid();
  write_header(os, g);
  for (int j = 0; j < g.ntheta(); ++j) write_row(os, 0, j + 1, trace[j]);
}

void write_csv(const std::string& path, const PolarField& field) {
  auto os = open_out(path);
  write_csv(os, field);
}

void write_csv(const std::string& path, const BoundaryTrace& trace) {
  auto os = open_out(path);
  write_csv(os, trace);
}

PolarField read_field_csv(std::istream& is) {
  const PolarGrid g = read_header(is);
  std::vector<cdouble> v(g.size());
  std::vector<bool> seen(g.size(), false);
  Row row{};
  std::size_t count = 0;
  while (read_row(is, row)) {
    if (row.i < 1 || row.i > g.nr() || row.j < 1 || row.j > g.ntheta())
      throw FormatError("csv: field index out of range");
    const std::size_t n = static_cast<std::size_t>(row.i - 1) * g.ntheta() + (row.j - 1);
    if (seen[n]) throw FormatError("csv: duplicate field entry");
    seen[n] = true;
    v[n] = row.z;
    ++count;
  }
  if (count != g.size()) throw FormatError("csv: incomplete field");
  return PolarField(g, std::move(v));
}

BoundaryTrace read_trace_csv(std::istream& is) {
  const PolarGrid g = read_header(is);
  std::vector<cdouble> v(g.ntheta());
  std::vector<bool> seen(g.ntheta(), false);
  Row row{};
  int count = 0;
  while (read_row(is, row)) {
    if (row.i != 0 || row.j < 1 || row.j > g.ntheta())
      throw FormatError("csv: trace index out of range");
    if (seen[row.j - 1]) throw FormatError("csv: duplicate trace entry");
    seen[row.j - 1] = true;
    v[row.j - 1] = row.z;
    ++count;
  }
  if (count != g.ntheta()) throw FormatError("csv: incomplete trace");
  return BoundaryTrace(g, std::move(v));
}

PolarField read_field_csv(const std::string& path) {
  auto is = open_in(path);
  return read_field_csv(is);
}

BoundaryTrace read_trace_csv(const std::string& path) {
  auto is = open_in(path);
  return read_trace_csv(is);
}

}  // namespace nlsinv
