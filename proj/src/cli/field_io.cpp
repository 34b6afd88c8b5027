#include "herm/cli/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "herm/errors.hpp"
#include "json.hpp"

namespace herm::cli {
namespace {

using json = nlohmann::json;

std::string axis_list(const TorusGrid& g) {
  std::string s;
  for (int a = 0; a < g.axes(); ++a) {
    if (a) s += ",";
    s += (a < g.n() ? "x" : "y") + std::to_string(a % g.n() + 1);
  }
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write field file '" + path + "'");
  out << std::setprecision(17);
  return out;
}

ScalarField read_csv(std::istream& in, const std::string& path) {
  int n = 0;
  int N = 0;
  bool real = true;
  std::string line;
  std::vector<cd> values;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      while (ls >> key) {
        if (key.rfind("n=", 0) == 0) n = std::stoi(key.substr(2));
        if (key.rfind("N=", 0) == 0) N = std::stoi(key.substr(2));
        if (key == "complex") real = false;
      }
      continue;
    }
    if (!header_done) {
      header_done = true;  // column names
      continue;
    }
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    char comma = 0;
    if (!(ls >> re)) throw IoError("malformed row in '" + path + "'");
    if (!real && !(ls >> comma >> im)) throw IoError("malformed complex row in '" + path + "'");
    values.emplace_back(re, im);
  }
  if (n == 0 || N == 0) throw IoError("field file '" + path + "' has no grid header");
  const TorusGrid g = make_grid(n, N);
  if (values.size() != g.size()) throw IoError("field file '" + path + "' has the wrong number of rows");
  return ScalarField(g, std::move(values), real);
}

ScalarField read_json(std::istream& in, const std::string& path) {
  json j;
  try {
    in >> j;
    const TorusGrid g = make_grid(j.at("grid").at("n").get<int>(), j.at("grid").at("N").get<int>());
    const bool real = j.at("real").get<bool>();
    const auto& v = j.at("values");
    if (v.size() != g.size()) throw IoError("field file '" + path + "' has the wrong number of values");
    std::vector<cd> values;
    values.reserve(v.size());
    for (const auto& x : v) {
      values.push_back(real ? cd{x.get<double>(), 0.0} : cd{x.at(0).get<double>(), x.at(1).get<double>()});
    }
    return ScalarField(g, std::move(values), real);
  } catch (const json::exception& e) {
    throw IoError("malformed field file '" + path + "': " + e.what());
  }
}

}  // namespace

void write_field(const ScalarField& field, const std::string& path, FieldFormat format) {
  const TorusGrid& g = field.grid();
  const bool real = field.is_real();
  if (format == FieldFormat::csv) {
    std::ofstream out = open_out(path);
    out << "# grid n=" << g.n() << " N=" << g.N() << " points=" << g.size()
        << (real ? " real" : " complex") << "\n";
    out << "# axes " << axis_list(g) << " row-major, last axis fastest, x = index / N\n";
    out << (real ? "value" : "re,im") << "\n";
    for (std::size_t p = 0; p < field.size(); ++p) {
      if (real) {
        out << field[p].real() << "\n";
      } else {
        out << field[p].real() << "," << field[p].imag() << "\n";
      }
    }
    if (!out) throw IoError("write failed for '" + path + "'");
    return;
  }
  json j;
  j["grid"] = {{"n", g.n()}, {"N", g.N()}, {"axes", axis_list(g)}, {"order", "row-major, last axis fastest"}};
  j["real"] = real;
  json values = json::array();
  for (std::size_t p = 0; p < field.size(); ++p) {
    if (real) {
      values.push_back(field[p].real());
    } else {
      values.push_back({field[p].real(), field[p].imag()});
    }
  }
  j["values"] = std::move(values);
  std::ofstream out = open_out(path);
  out << j.dump() << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

ScalarField read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read field file '" + path + "'");
  const int c = in.peek();
  if (c == '{') return read_json(in, path);
  return read_csv(in, path);
}

void write_slice_csv(const ScalarField& field, int axis, const std::string& path) {
  const TorusGrid& g = field.grid();
  if (axis < 0 || axis >= g.axes()) throw InvalidArgument("write_slice_csv: axis out of range");
  std::ofstream out = open_out(path);
  const std::string name = (axis < g.n() ? "x" : "y") + std::to_string(axis % g.n() + 1);
  out << "# slice along " << name << " through the origin, n=" << g.n() << " N=" << g.N() << "\n";
  out << name << (field.is_real() ? ",value" : ",re,im") << "\n";
  AxisIndex idx{};
  for (int i = 0; i < g.N(); ++i) {
    idx[axis] = i;
    const cd v = field[g.ravel(idx)];
    out << static_cast<double>(i) / g.N() << "," << v.real();
    if (!field.is_real()) out << "," << v.imag();
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace herm::cli
