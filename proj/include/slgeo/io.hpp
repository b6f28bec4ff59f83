#pragma once

// CSV, OBJ and JSON output.  Numbers are written in the shortest form that
// reads back to the same double.

#include <iosfwd>
#include <string>
#include <vector>

#include "slgeo/calibration.hpp"

namespace slgeo::io {

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

struct Table {
  std::vector<std::string> comments;  // written as "# ..." lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const Table& t);
/// Reads what write_csv writes.  Throws DomainError on malformed input.
Table read_csv(std::istream& is);

/// A (nu x nv) grid of points of C^3, row-major in u.
struct Mesh {
  int nu = 0;
  int nv = 0;
  std::vector<ComplexPoint> points;
  std::vector<std::string> comments;
};

/// Vertices are (Re z1, Re z2, Re z3); each vertex line is followed by a
/// "#z" comment with all six real coordinates.  Two triangles per grid cell.
void write_obj(std::ostream& os, const Mesh& mesh);

struct ObjCounts {
  int vertices = 0;
  int triangles = 0;
  std::vector<ComplexPoint> points;  // recovered from the "#z" lines
};
ObjCounts read_obj(std::istream& is);

/// Table of sampled points: parameter columns p0.., then Re/Im of each z_j.
Table point_table(const std::vector<std::vector<double>>& params,
                  const std::vector<ComplexPoint>& points);

}  // namespace slgeo::io
