#include "dpp/field_io.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace dpp {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

FieldCsvWriter::FieldCsvWriter(const std::filesystem::path& path, int dim) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out_ << "j,t";
  for (int a = 1; a <= dim; ++a) out_ << ",i" << a;
  for (int a = 1; a <= dim; ++a) out_ << ",x" << a;
  out_ << ",value\n";
}

void FieldCsvWriter::write_slice(const Field& field, int j) {
  const SpatialGrid& grid = field.grid();
  const Vec& values = field.slice(j);
  const std::string t = format_double(field.time(j));
  const std::string js = std::to_string(j);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const Eigen::VectorXi idx = grid.multi_index(node);
    buffer_ += js;
    buffer_ += ',';
    buffer_ += t;
    for (int a = 0; a < grid.dim(); ++a) {
      buffer_ += ',';
      buffer_ += std::to_string(idx[a]);
    }
    for (int a = 0; a < grid.dim(); ++a) {
      buffer_ += ',';
      buffer_ += format_double(grid.coordinate(a, idx[a]));
    }
    buffer_ += ',';
    buffer_ += format_double(values[static_cast<Eigen::Index>(node)]);
    buffer_ += '\n';
    if (buffer_.size() > (1u << 20)) {
      out_ << buffer_;
      buffer_.clear();
    }
  }
  out_ << buffer_;
  buffer_.clear();
  if (!out_) throw std::runtime_error("field CSV write failed");
}

void FieldCsvWriter::close() { out_.close(); }

std::vector<FieldCsvRow> read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  int columns = 1;
  for (char c : line) columns += (c == ',');
  const int dim = (columns - 3) / 2;
  if (dim < 1 || 2 * dim + 3 != columns) throw std::runtime_error("malformed field CSV header: " + line);
  std::vector<FieldCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != columns) throw std::runtime_error("malformed field CSV row: " + line);
    FieldCsvRow row;
    row.j = std::stoi(cells[0]);
    row.t = std::stod(cells[1]);
    for (int a = 0; a < dim; ++a) row.index.push_back(std::stoi(cells[static_cast<std::size_t>(2 + a)]));
    for (int a = 0; a < dim; ++a) row.x.push_back(std::stod(cells[static_cast<std::size_t>(2 + dim + a)]));
    row.value = std::stod(cells.back());
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json field_sidecar(const Field& field, const DppStencil& stencil) {
  const DppParams& p = field.params();
  const Box& box = p.box();
  nlohmann::json j;
  j["params"] = {{"alpha", p.alpha},
                 {"beta", p.beta},
                 {"epsilon", p.epsilon()},
                 {"T", p.horizon()},
                 {"n", p.dim()},
                 {"time_step", p.time_step()}};
  j["domain"] = {{"center", std::vector<double>(box.center().data(), box.center().data() + box.dim())},
                 {"half_width", box.half_width()},
                 {"description", box.describe()}};
  j["grid"] = {{"spacing", field.grid().spacing()}, {"nodes_per_axis", field.grid().nodes_per_axis()}};
  j["directions"] = stencil.direction_count();
  j["quadrature_order"] = stencil.quadrature().order;
  j["boundary"] = {{"kind", field.boundary().kind_name()}, {"expression", field.boundary().to_expression(p.dim())}};
  j["time_lattice"] = {{"anchor", 0.0},
                       {"last_slice", field.last_slice()},
                       {"last_time", field.time(field.last_slice())},
                       {"initial_slice_representative", "F(x, 0)"}};
  j["csv_columns"] = "j,t,i1..in,x1..xn,value";
  return j;
}

}  // namespace dpp
