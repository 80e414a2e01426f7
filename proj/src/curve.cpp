#include "qam/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qam/errors.hpp"

namespace qam {

void DecayCurve::canonicalize() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const DecayPoint& a, const DecayPoint& b) {
                     if (a.inv_hbar_snapped != b.inv_hbar_snapped)
                       return a.inv_hbar_snapped < b.inv_hbar_snapped;
                     return a.method < b.method;
                   });
}

std::string decay_curve_csv(const DecayCurve& c) {
  std::ostringstream os;
  os.precision(16);
  os << "inv_hbar_requested,inv_hbar_snapped,m,n,gamma,w,method,nu_or_rho,overlap\n";
  for (const auto& r : c.rows) {
    os << r.inv_hbar_requested << ',' << r.inv_hbar_snapped << ',' << r.m << ','
       << r.n << ',' << r.gamma << ',' << r.w << ',' << r.method << ','
       << r.nu_or_rho << ',' << r.overlap << '\n';
  }
  return os.str();
}

DecayCurve decay_curve_from_csv(const std::string& text) {
  DecayCurve c;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    DecayPoint p;
    auto next = [&]() {
      if (!std::getline(ls, field, ','))
        throw Error("decay_curve_from_csv: short row");
      return field;
    };
    p.inv_hbar_requested = std::stod(next());
    p.inv_hbar_snapped = std::stod(next());
    p.m = std::stol(next());
    p.n = std::stol(next());
    p.gamma = std::stod(next());
    p.w = std::stod(next());
    p.method = next();
    p.nu_or_rho = std::stod(next());
    p.overlap = std::stod(next());
    c.rows.push_back(std::move(p));
  }
  return c;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("write_file: cannot open " + path);
  f << content;
  if (!f) throw Error("write_file: short write to " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("read_file: cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace qam
