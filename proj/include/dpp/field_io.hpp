#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpp/field.hpp"

namespace dpp {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Streams slices as CSV rows `j,t,i1..in,x1..xn,value`.
class FieldCsvWriter {
 public:
  FieldCsvWriter(const std::filesystem::path& path, int dim);
  void write_slice(const Field& field, int j);
  void close();

 private:
  std::ofstream out_;
  std::string buffer_;
};

struct FieldCsvRow {
  int j;
  double t;
  std::vector<int> index;
  std::vector<double> x;
  double value;
};

/// Reads a CSV written by FieldCsvWriter; the dimension comes from the header.
std::vector<FieldCsvRow> read_field_csv(const std::filesystem::path& path);

/// JSON sidecar describing the run that produced a field.
nlohmann::json field_sidecar(const Field& field, const DppStencil& stencil);

}  // namespace dpp
