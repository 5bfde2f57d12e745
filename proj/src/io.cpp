#include "kdvbvp/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kdvbvp/error.hpp"

namespace kdvbvp {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_fail(const std::string& what) { throw Error(ErrorCode::config_invalid, what); }

double round15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

nlohmann::json round15(const std::vector<double>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(round15(x));
  return j;
}

std::string derivative_name(int k) {
  switch (k) {
    case 0: return "q";
    case 1: return "q_x";
    case 2: return "q_xx";
    case 3: return "q_xxx";
    default: return "q_x" + std::to_string(k);
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::config_invalid, "cannot write '" + p.string() + "'");
  return out;
}

void write_jet(std::ostream& os, const Jet& jet) {
  for (int k = 0; k <= jet.order(); ++k) os << ',' << format_double(jet[k]);
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) io_fail("cannot open '" + p.string() + "'");
  Csv csv;
  std::string line;
  if (!std::getline(in, line) || line.empty()) io_fail("'" + p.string() + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) csv.header.push_back(cell);
  }
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end == cell.c_str() || *end != '\0') {
        io_fail("'" + p.string() + "' line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != csv.header.size()) {
      io_fail("'" + p.string() + "' line " + std::to_string(lineno) + ": expected " +
              std::to_string(csv.header.size()) + " columns");
    }
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

std::vector<double> json_doubles(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) io_fail(std::string("field.json lacks array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) io_fail(std::string("field.json '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SolitonData soliton_data_from_json(const nlohmann::json& j) {
  if (!j.is_array()) io_fail("soliton data must be an array of {\"kappa\", \"g\"} objects");
  std::vector<Soliton> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("kappa") || !e.contains("g") || !e.at("kappa").is_number() ||
        !e.at("g").is_number()) {
      io_fail("each soliton needs numeric 'kappa' and 'g'");
    }
    out.push_back({e.at("kappa").get<double>(), e.at("g").get<double>()});
  }
  return SolitonData(std::move(out));
}

nlohmann::json soliton_data_to_json(const SolitonData& data) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : data.solitons()) j.push_back({{"kappa", s.kappa}, {"g", s.g}});
  return j;
}

nlohmann::json spectral_to_json(const SpectralSetup& setup) {
  nlohmann::json j;
  j["s"] = setup.s();
  j["C"] = round15(setup.coefficients().C);
  j["d"] = round15(setup.dispersion().d());
  j["delta"] = round15(setup.dispersion().delta());
  j["mu_minus"] = round15(setup.mu_minus());
  j["mu_star"] = round15(setup.mu_star());
  j["c0"] = round15(setup.roots().c0);
  j["c"] = round15(setup.roots().c);
  j["cprime"] = round15(setup.roots().cprime);
  j["gamma"] = round15(setup.gamma());
  j["a"] = round15(setup.a());
  return j;
}

void write_field(const SolutionField& field, const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::config_invalid, "cannot create '" + dir + "': " + ec.message());
  const int order = field.slices.empty() ? 0 : field.slices.front().origin.order();

  auto jet_header = [&](std::ostream& os) {
    for (int k = 0; k <= order; ++k) os << ',' << derivative_name(k);
    os << '\n';
  };
  {
    auto os = open_out(root / "solution.csv");
    os << "t,x";
    jet_header(os);
    for (const auto& sl : field.slices) {
      for (size_t j = 0; j < field.x_grid.size(); ++j) {
        os << format_double(sl.t) << ',' << format_double(field.x_grid[j]);
        write_jet(os, sl.jets[j]);
        os << '\n';
      }
    }
  }
  {
    auto os = open_out(root / "origin.csv");
    os << "t";
    jet_header(os);
    for (const auto& sl : field.slices) {
      os << format_double(sl.t);
      write_jet(os, sl.origin);
      os << '\n';
    }
  }
  {
    auto os = open_out(root / "w.csv");
    os << "t,w,M_lower,M_upper\n";
    for (const auto& sl : field.slices) {
      os << format_double(sl.t) << ',' << format_double(sl.w.w) << ',' << format_double(sl.w.lower) << ','
         << format_double(sl.w.upper) << '\n';
    }
  }
  {
    auto os = open_out(root / "measure.csv");
    os << "t,xi,weight\n";
    for (const auto& sl : field.slices) {
      for (const auto& p : sl.measure.poles()) {
        os << format_double(sl.t) << ',' << format_double(p.xi) << ',' << format_double(p.weight) << '\n';
      }
    }
  }
  {
    nlohmann::json meta;
    meta["C"] = field.C;
    meta["a"] = field.a;
    meta["t_grid"] = field.t_grid;
    meta["x_grid"] = field.x_grid;
    meta["expected_pole_count"] = field.expected_pole_count;
    meta["jet_order"] = order;
    auto os = open_out(root / "field.json");
    os << meta.dump(2) << '\n';
  }
}

SolutionField read_field(const std::string& dir) {
  const fs::path root(dir);
  nlohmann::json meta;
  {
    std::ifstream in(root / "field.json");
    if (!in) io_fail("cannot open '" + (root / "field.json").string() + "'");
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      io_fail("field.json is not valid JSON: " + std::string(e.what()));
    }
  }
  SolutionField field;
  field.C = json_doubles(meta, "C");
  field.a = json_doubles(meta, "a");
  field.t_grid = json_doubles(meta, "t_grid");
  field.x_grid = json_doubles(meta, "x_grid");
  if (!meta.contains("expected_pole_count") || !meta.at("expected_pole_count").is_number_integer()) {
    io_fail("field.json lacks 'expected_pole_count'");
  }
  field.expected_pole_count = meta.at("expected_pole_count").get<int>();
  const size_t nt = field.t_grid.size();
  const size_t nx = field.x_grid.size();
  if (nt == 0) io_fail("field.json has an empty t grid");
  field.slices.resize(nt);
  for (size_t i = 0; i < nt; ++i) field.slices[i].t = field.t_grid[i];

  auto find_t = [&](double t, const std::string& file) {
    for (size_t i = 0; i < nt; ++i) {
      if (field.t_grid[i] == t) return i;
    }
    io_fail(file + ": t = " + format_double(t) + " is not on the t grid");
  };

  const Csv sol = read_csv(root / "solution.csv");
  if (sol.header.size() < 3 || sol.rows.size() != nt * nx) {
    io_fail("solution.csv: expected " + std::to_string(nt * nx) + " rows, found " + std::to_string(sol.rows.size()));
  }
  for (size_t r = 0; r < sol.rows.size(); ++r) {
    const auto& row = sol.rows[r];
    const size_t i = r / (nx == 0 ? 1 : nx);
    const size_t j = r % (nx == 0 ? 1 : nx);
    if (row[0] != field.t_grid[i] || row[1] != field.x_grid[j]) {
      io_fail("solution.csv row " + std::to_string(r + 2) + " is out of grid order");
    }
    field.slices[i].jets.emplace_back(std::vector<double>(row.begin() + 2, row.end()));
  }

  const Csv origin = read_csv(root / "origin.csv");
  if (origin.header.size() < 2 || origin.rows.size() != nt) io_fail("origin.csv: expected one row per t");
  for (const auto& row : origin.rows) {
    field.slices[find_t(row[0], "origin.csv")].origin = Jet(std::vector<double>(row.begin() + 1, row.end()));
  }

  const Csv w = read_csv(root / "w.csv");
  if (w.header.size() != 4 || w.rows.size() != nt) io_fail("w.csv: expected columns t,w,M_lower,M_upper per t");
  for (const auto& row : w.rows) field.slices[find_t(row[0], "w.csv")].w = RiccatiValue{row[1], row[2], row[3]};

  const Csv meas = read_csv(root / "measure.csv");
  if (meas.header.size() != 3) io_fail("measure.csv: expected columns t,xi,weight");
  std::vector<std::vector<WeylPole>> poles(nt);
  for (const auto& row : meas.rows) poles[find_t(row[0], "measure.csv")].push_back({row[1], row[2]});
  for (size_t i = 0; i < nt; ++i) {
    try {
      field.slices[i].measure = DiscreteWeylFunction(std::move(poles[i]));
    } catch (const Error& e) {
      io_fail("measure.csv: " + std::string(e.what()));
    }
  }
  return field;
}

}  // namespace kdvbvp
