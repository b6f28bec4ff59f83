#include "slgeo/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "slgeo/error.hpp"

namespace slgeo::io {
namespace {

double parse_double(const std::string& s) {
  double x = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e) throw DomainError("not a number: '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw DomainError("format_double failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& os, const Table& t) {
  for (const auto& c : t.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw DomainError("write_csv: ragged row");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      t.comments.push_back(line.substr(2));
      continue;
    }
    const auto cells = split(line, ',');
    if (!have_header) {
      t.columns = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) throw DomainError("read_csv: ragged row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw DomainError("read_csv: no header line");
  return t;
}

void write_obj(std::ostream& os, const Mesh& mesh) {
  if (mesh.nu < 2 || mesh.nv < 2) throw DomainError("write_obj: need at least a 2x2 grid");
  if (static_cast<int>(mesh.points.size()) != mesh.nu * mesh.nv) {
    throw DomainError("write_obj: point count does not match the grid");
  }
  for (const auto& c : mesh.comments) os << "# " << c << '\n';
  for (const auto& z : mesh.points) {
    if (z.size() != 3) throw DomainError("write_obj: meshes are for points of C^3");
    os << "v " << format_double(z(0).real()) << ' ' << format_double(z(1).real()) << ' '
       << format_double(z(2).real()) << '\n';
    os << "#z";
    for (int j = 0; j < 3; ++j) {
      os << ' ' << format_double(z(j).real()) << ' ' << format_double(z(j).imag());
    }
    os << '\n';
  }
  auto idx = [&](int i, int j) { return i * mesh.nv + j + 1; };
  for (int i = 0; i + 1 < mesh.nu; ++i) {
    for (int j = 0; j + 1 < mesh.nv; ++j) {
      os << "f " << idx(i, j) << ' ' << idx(i + 1, j) << ' ' << idx(i + 1, j + 1) << '\n';
      os << "f " << idx(i, j) << ' ' << idx(i + 1, j + 1) << ' ' << idx(i, j + 1) << '\n';
    }
  }
}

ObjCounts read_obj(std::istream& is) {
  ObjCounts c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) {
      ++c.vertices;
    } else if (line.rfind("f ", 0) == 0) {
      ++c.triangles;
    } else if (line.rfind("#z ", 0) == 0) {
      const auto cells = split(line.substr(3), ' ');
      if (cells.size() != 6) throw DomainError("read_obj: malformed #z line");
      ComplexPoint z(3);
      for (int j = 0; j < 3; ++j) {
        z(j) = cplx(parse_double(cells[static_cast<std::size_t>(2 * j)]),
                    parse_double(cells[static_cast<std::size_t>(2 * j + 1)]));
      }
      c.points.push_back(z);
    }
  }
  return c;
}

Table point_table(const std::vector<std::vector<double>>& params,
                  const std::vector<ComplexPoint>& points) {
  if (params.size() != points.size() || points.empty()) {
    throw DomainError("point_table: need matching, non-empty parameter and point lists");
  }
  Table t;
  const std::size_t k = params.front().size();
  const auto m = points.front().size();
  for (std::size_t i = 0; i < k; ++i) t.columns.push_back("p" + std::to_string(i));
  for (Eigen::Index j = 1; j <= m; ++j) {
    t.columns.push_back("re_z" + std::to_string(j));
    t.columns.push_back("im_z" + std::to_string(j));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> row = params[i];
    for (Eigen::Index j = 0; j < m; ++j) {
      row.push_back(points[i](j).real());
      row.push_back(points[i](j).imag());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace slgeo::io
