#include "liequant/serialization.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "grid_data.hpp"

namespace liequant {

namespace {

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("serialization: " + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  check(os.good(), "cannot write " + path);
  os.precision(17);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  check(is.good(), "cannot read " + path);
  return is;
}

Irrep irrep_from_label(const GroupId& group, const std::string& label) {
  check(label.size() > 2 && label[1] == '=', "bad irrep label " + label);
  const std::string body = label.substr(2);
  if (label[0] == 'l') {
    const double ell = std::strtod(body.c_str(), nullptr);
    return detail::make_su2_irrep(group, static_cast<int>(std::lround(2.0 * ell)));
  }
  check(label[0] == 'k', "bad irrep label " + label);
  std::vector<int> k;
  std::stringstream ss(body);
  std::string part;
  while (std::getline(ss, part, ',')) k.push_back(std::atoi(part.c_str()));
  check(static_cast<int>(k.size()) == group.torus_dim, "frequency arity in " + label);
  return detail::make_torus_irrep(k);
}

void write_block(std::ofstream& os, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
    }
    os << '\n';
  }
}

Matrix read_block(std::ifstream& is, int dim) {
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      double re = 0.0, im = 0.0;
      check(static_cast<bool>(is >> re >> im), "truncated matrix block");
      m(r, c) = complexd(re, im);
    }
  return m;
}

std::vector<Irrep> read_irrep_records(std::ifstream& is, const GroupId& group, std::size_t n,
                                      std::vector<Matrix>* blocks) {
  std::vector<Irrep> irreps;
  irreps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string tag, label, dimword;
    int dim = 0;
    check(static_cast<bool>(is >> tag >> label >> dimword >> dim) && tag == "irrep" && dimword == "dim",
          "bad irrep record");
    Irrep xi = irrep_from_label(group, label);
    check(xi.dim == dim, "dimension mismatch for " + label);
    if (blocks) blocks->push_back(read_block(is, dim));
    irreps.push_back(std::move(xi));
  }
  return irreps;
}

}  // namespace

std::string format_double(double v) {
  for (const char* spec : {"%.15g", "%.16g", "%.17g"}) {
    std::string s = fmt(v, spec);
    if (std::strtod(s.c_str(), nullptr) == v) return s;
  }
  return fmt(v, "%.17g");
}

void save_spectral(const SpectralCoefficients& c, const std::string& path) {
  auto os = open_out(path);
  os << "spectral v1\n";
  os << "group " << c.group.name() << '\n';
  os << "band " << format_double(c.band) << '\n';
  os << "count " << c.irreps.size() << '\n';
  for (std::size_t i = 0; i < c.irreps.size(); ++i) {
    os << "irrep " << c.irreps[i].label() << " dim " << c.irreps[i].dim << '\n';
    write_block(os, c.blocks[i]);
  }
  check(os.good(), "write failed for " + path);
}

SpectralCoefficients load_spectral(const std::string& path) {
  auto is = open_in(path);
  std::string word, ver, groupname;
  check(static_cast<bool>(is >> word >> ver) && word == "spectral" && ver == "v1",
        "not a spectral file: " + path);
  SpectralCoefficients c;
  std::size_t n = 0;
  check(static_cast<bool>(is >> word >> groupname) && word == "group", "missing group line");
  c.group = parse_group(groupname);
  check(static_cast<bool>(is >> word >> c.band) && word == "band", "missing band line");
  check(static_cast<bool>(is >> word >> n) && word == "count", "missing count line");
  c.irreps = read_irrep_records(is, c.group, n, &c.blocks);
  return c;
}

void save_grid_function(const GridFunction& f, const std::string& path) {
  auto os = open_out(path);
  const auto& g = f.grid;
  os << "# gridfunction v1\n";
  os << "# group " << g.group().name() << '\n';
  os << "# band " << format_double(g.band()) << '\n';
  os << "# oversample " << format_double(g.oversample()) << '\n';
  os << "# homogeneous " << (f.homogeneous ? 1 : 0) << '\n';
  const int cd = g.group().coord_dim();
  os << "#";
  for (int j = 0; j < cd; ++j) os << " x" << j;
  os << " weight re im\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    for (int j = 0; j < cd; ++j) os << format_double(x(j)) << ',';
    os << format_double(g.weights()(static_cast<Eigen::Index>(i))) << ','
       << format_double(f.values(static_cast<Eigen::Index>(i)).real()) << ','
       << format_double(f.values(static_cast<Eigen::Index>(i)).imag()) << '\n';
  }
  check(os.good(), "write failed for " + path);
}

GridFunction load_grid_function(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  GroupId group;
  double band = -1.0, oversample = 1.0;
  int homogeneous = 0;
  bool have_group = false;
  std::vector<complexd> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "group") {
        std::string name;
        ls >> name;
        group = parse_group(name);
        have_group = true;
      } else if (key == "band") {
        ls >> band;
      } else if (key == "oversample") {
        ls >> oversample;
      } else if (key == "homogeneous") {
        ls >> homogeneous;
      }
      continue;
    }
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    check(row.size() >= 2, "short data row in " + path);
    vals.emplace_back(row[row.size() - 2], row[row.size() - 1]);
  }
  check(have_group && band >= 0.0, "missing grid metadata in " + path);
  GridFunction f;
  f.grid = haar_grid(group, band, oversample);
  check(vals.size() == f.grid.size(), "node count mismatch in " + path);
  f.values.resize(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) f.values(static_cast<Eigen::Index>(i)) = vals[i];
  f.homogeneous = homogeneous != 0;
  return f;
}

void save_symbol(const Symbol& a, const std::string& path) {
  auto os = open_out(path);
  os << "symbol v1\n";
  os << "group " << a.group.name() << '\n';
  os << "band " << format_double(a.band) << '\n';
  os << "spatial_band " << format_double(a.spatial_band) << '\n';
  os << "closed_form " << (a.closed_form ? a.closed_form->spec : "-") << '\n';
  os << "count " << a.irreps.size() << '\n';
  for (const auto& xi : a.irreps) os << "irrep " << xi.label() << " dim " << xi.dim << '\n';
  os << "modes " << a.modes.size() << '\n';
  for (const auto& mode : a.modes) {
    os << "mode " << mode.eta.label() << " dim " << mode.eta.dim << " row " << mode.row << " col "
       << mode.col << '\n';
    for (std::size_t i = 0; i < a.irreps.size(); ++i) write_block(os, mode.bank[i]);
  }
  check(os.good(), "write failed for " + path);
}

Symbol load_symbol(const std::string& path) {
  auto is = open_in(path);
  std::string word, ver, name, cf;
  check(static_cast<bool>(is >> word >> ver) && word == "symbol" && ver == "v1",
        "not a symbol file: " + path);
  Symbol a;
  check(static_cast<bool>(is >> word >> name) && word == "group", "missing group line");
  a.group = parse_group(name);
  check(static_cast<bool>(is >> word >> a.band) && word == "band", "missing band line");
  check(static_cast<bool>(is >> word >> a.spatial_band) && word == "spatial_band",
        "missing spatial_band line");
  check(static_cast<bool>(is >> word >> cf) && word == "closed_form", "missing closed_form line");
  if (cf != "-") a.closed_form = BuiltinSpec{cf};
  std::size_t n = 0, nm = 0;
  check(static_cast<bool>(is >> word >> n) && word == "count", "missing count line");
  a.irreps = read_irrep_records(is, a.group, n, nullptr);
  check(static_cast<bool>(is >> word >> nm) && word == "modes", "missing modes line");
  a.modes.reserve(nm);
  for (std::size_t m = 0; m < nm; ++m) {
    std::string tag, label, dimword, roword, colword;
    int dim = 0;
    SpatialMode mode;
    check(static_cast<bool>(is >> tag >> label >> dimword >> dim >> roword >> mode.row >> colword >>
                            mode.col) &&
              tag == "mode" && dimword == "dim" && roword == "row" && colword == "col",
          "bad mode record");
    mode.eta = irrep_from_label(a.group, label);
    check(mode.eta.dim == dim, "mode dimension mismatch for " + label);
    mode.bank.reserve(n);
    for (std::size_t i = 0; i < n; ++i) mode.bank.push_back(read_block(is, a.irreps[i].dim));
    a.modes.push_back(std::move(mode));
  }
  return a;
}

}  // namespace liequant
