#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "oactl/errors.hpp"
#include "oactl/lp.hpp"

// Fixed-format MPS writer/reader.  Field columns follow the classic layout;
// numeric fields carry 17 significant digits and may overrun their nominal
// width, which whitespace-delimited MPS readers accept.

namespace oactl {

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_pair(std::ostream& out, const std::string& col, const std::string& row,
               double val) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %s\n", col.c_str(), row.c_str(),
                num17(val).c_str());
  out << buf;
}

}  // namespace

void export_mps(const LinearProgram& lp, const std::string& path) {
  lp.validate();
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");

  out << "NAME          " << lp.name() << "\n";
  out << "ROWS\n";
  out << " N  OBJ\n";
  for (int r = 0; r < lp.num_rows(); ++r)
    out << (lp.row(r).sense == RowSense::EQ ? " E  " : " L  ") << lp.row_name(r)
        << "\n";

  // Column-major entries; every variable appears at least with its objective
  // coefficient so that import preserves the variable set and order.
  std::vector<std::vector<std::pair<int, double>>> by_var(lp.num_vars());
  for (int r = 0; r < lp.num_rows(); ++r) {
    const LpRow& row = lp.row(r);
    for (std::size_t k = 0; k < row.idx.size(); ++k)
      by_var[row.idx[k]].emplace_back(r, row.val[k]);
  }
  out << "COLUMNS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    emit_pair(out, lp.var_name(j), "OBJ", lp.objective_coef(j));
    for (const auto& [r, v] : by_var[j]) emit_pair(out, lp.var_name(j), lp.row_name(r), v);
  }

  out << "RHS\n";
  for (int r = 0; r < lp.num_rows(); ++r)
    if (lp.row(r).rhs != 0.0) emit_pair(out, "RHS", lp.row_name(r), lp.row(r).rhs);

  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower_bound(j), hi = lp.upper_bound(j);
    const bool flo = std::isfinite(lo), fhi = std::isfinite(hi);
    char buf[128];
    if (!flo && !fhi) {
      std::snprintf(buf, sizeof(buf), " FR BND       %-8s\n", lp.var_name(j).c_str());
      out << buf;
    } else if (flo && fhi && lo == hi) {
      std::snprintf(buf, sizeof(buf), " FX BND       %-8s  %s\n",
                    lp.var_name(j).c_str(), num17(lo).c_str());
      out << buf;
    } else {
      if (flo) {
        std::snprintf(buf, sizeof(buf), " LO BND       %-8s  %s\n",
                      lp.var_name(j).c_str(), num17(lo).c_str());
        out << buf;
      } else {
        std::snprintf(buf, sizeof(buf), " MI BND       %-8s\n", lp.var_name(j).c_str());
        out << buf;
      }
      if (fhi) {
        std::snprintf(buf, sizeof(buf), " UP BND       %-8s  %s\n",
                      lp.var_name(j).c_str(), num17(hi).c_str());
        out << buf;
      }
    }
  }
  out << "ENDATA\n";
  if (!out) throw InputError("failed while writing '" + path + "'");
}

LinearProgram import_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open MPS file '" + path + "'");

  enum class Section { None, Rows, Columns, Rhs, Bounds, Ranges, Done };
  Section section = Section::None;

  std::string problem_name = "lp";
  std::string obj_name;
  struct RowDef {
    std::string name;
    char sense;  // 'L', 'G', 'E'
  };
  std::vector<RowDef> row_defs;
  std::map<std::string, int> row_index;
  std::vector<std::string> var_order;
  std::map<std::string, int> var_index;
  std::map<int, double> objective;
  std::vector<std::vector<std::pair<int, double>>> entries;  // per row
  std::vector<double> rhs;
  struct BoundMod {
    std::string type, var;
    double val;
  };
  std::vector<BoundMod> bound_mods;

  auto var_id = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    const int id = static_cast<int>(var_order.size());
    var_index[name] = id;
    var_order.push_back(name);
    return id;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '*') continue;  // comment
    std::istringstream ls(line);
    if (line[0] != ' ' && line[0] != '\t') {
      std::string head;
      ls >> head;
      if (head == "NAME") {
        ls >> problem_name;
      } else if (head == "ROWS") {
        section = Section::Rows;
      } else if (head == "COLUMNS") {
        section = Section::Columns;
      } else if (head == "RHS") {
        section = Section::Rhs;
      } else if (head == "BOUNDS") {
        section = Section::Bounds;
      } else if (head == "RANGES") {
        throw InputError("MPS RANGES section is not supported");
      } else if (head == "ENDATA") {
        section = Section::Done;
        break;
      } else {
        throw InputError("unknown MPS section '" + head + "' at line " +
                         std::to_string(line_no));
      }
      continue;
    }
    switch (section) {
      case Section::Rows: {
        std::string sense, name;
        ls >> sense >> name;
        if (sense.size() != 1 || name.empty())
          throw InputError("malformed ROWS line " + std::to_string(line_no));
        if (sense == "N") {
          if (obj_name.empty()) obj_name = name;
          break;  // extra N rows are ignored
        }
        if (sense != "L" && sense != "G" && sense != "E")
          throw InputError("unsupported row sense '" + sense + "' at line " +
                           std::to_string(line_no));
        row_index[name] = static_cast<int>(row_defs.size());
        row_defs.push_back({name, sense[0]});
        entries.emplace_back();
        rhs.push_back(0.0);
        break;
      }
      case Section::Columns: {
        std::string col;
        ls >> col;
        std::string row_name;
        double val;
        bool any = false;
        while (ls >> row_name >> val) {
          any = true;
          const int j = var_id(col);
          if (row_name == obj_name) {
            objective[j] = val;
          } else {
            auto it = row_index.find(row_name);
            if (it == row_index.end())
              throw InputError("unknown row '" + row_name + "' at line " +
                               std::to_string(line_no));
            entries[it->second].emplace_back(j, val);
          }
        }
        if (!any)
          throw InputError("malformed COLUMNS line " + std::to_string(line_no));
        break;
      }
      case Section::Rhs: {
        std::string set;
        ls >> set;
        std::string row_name;
        double val;
        bool any = false;
        while (ls >> row_name >> val) {
          any = true;
          if (row_name == obj_name) continue;  // objective constants unsupported
          auto it = row_index.find(row_name);
          if (it == row_index.end())
            throw InputError("unknown RHS row '" + row_name + "' at line " +
                             std::to_string(line_no));
          rhs[it->second] = val;
        }
        if (!any) throw InputError("malformed RHS line " + std::to_string(line_no));
        break;
      }
      case Section::Bounds: {
        std::string type, set, var;
        ls >> type >> set >> var;
        if (type.empty() || var.empty())
          throw InputError("malformed BOUNDS line " + std::to_string(line_no));
        double val = 0.0;
        if (type == "UP" || type == "LO" || type == "FX") {
          if (!(ls >> val))
            throw InputError("missing bound value at line " + std::to_string(line_no));
        } else if (type != "FR" && type != "MI" && type != "PL") {
          throw InputError("unsupported bound type '" + type + "' at line " +
                           std::to_string(line_no));
        }
        var_id(var);
        bound_mods.push_back({type, var, val});
        break;
      }
      default:
        throw InputError("data line outside any section at line " +
                         std::to_string(line_no));
    }
  }

  if (var_order.empty()) throw InputError("MPS file declares no variables");

  LinearProgram lp(static_cast<int>(var_order.size()), problem_name);
  for (std::size_t j = 0; j < var_order.size(); ++j)
    lp.name_var(static_cast<int>(j), var_order[j]);
  for (const auto& [j, v] : objective) lp.set_objective(j, v);

  // MPS default bounds are [0, +inf); explicit BOUNDS entries then modify.
  std::vector<double> lo(var_order.size(), 0.0), hi(var_order.size(),
                                                    std::numeric_limits<double>::infinity());
  for (const BoundMod& b : bound_mods) {
    const int j = var_index.at(b.var);
    if (b.type == "FR") {
      lo[j] = -std::numeric_limits<double>::infinity();
      hi[j] = std::numeric_limits<double>::infinity();
    } else if (b.type == "MI") {
      lo[j] = -std::numeric_limits<double>::infinity();
    } else if (b.type == "PL") {
      hi[j] = std::numeric_limits<double>::infinity();
    } else if (b.type == "UP") {
      hi[j] = b.val;
    } else if (b.type == "LO") {
      lo[j] = b.val;
    } else if (b.type == "FX") {
      lo[j] = hi[j] = b.val;
    }
  }
  for (std::size_t j = 0; j < var_order.size(); ++j)
    lp.set_bounds(static_cast<int>(j), lo[j], hi[j]);

  for (std::size_t r = 0; r < row_defs.size(); ++r) {
    LpRow row;
    row.sense = row_defs[r].sense == 'E' ? RowSense::EQ : RowSense::LE;
    const double flip = row_defs[r].sense == 'G' ? -1.0 : 1.0;
    for (const auto& [j, v] : entries[r]) {
      row.idx.push_back(j);
      row.val.push_back(flip * v);
    }
    row.rhs = flip * rhs[r];
    const int id = lp.add_row(std::move(row));
    lp.name_row(id, row_defs[r].name);
  }
  return lp;
}

}  // namespace oactl
