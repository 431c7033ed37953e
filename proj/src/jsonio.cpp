#include "btq/jsonio.hpp"

#include "btq/errors.hpp"

namespace btq {

Json poly_to_json(const PolyA& f) {
  Json j = Json::array();
  for (int c : f.coeffs()) j.push_back(c);
  return j;
}

PolyA poly_from_json(const Json& j, int q) {
  std::vector<int> cs;
  for (auto& v : j) cs.push_back(v.get<int>());
  return PolyA(q, cs);
}

Json kelem_to_json(const KElem& x) {
  Json j;
  j["num"] = poly_to_json(x.num());
  j["den"] = poly_to_json(x.den());
  return j;
}

Json matk_to_json(const MatK& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows; ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(kelem_to_json(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Json mata_to_json(const MatA& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows; ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(poly_to_json(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

MatA mata_from_json(const Json& j, int q) {
  int rows = static_cast<int>(j.size());
  int cols = rows ? static_cast<int>(j[0].size()) : 0;
  MatA m(rows, cols, PolyA::zero(q));
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m.at(i, c) = poly_from_json(j[i][c], q);
  return m;
}

Json complex_to_json(const Complex& c) {
  Json j;
  Json dims = Json::array();
  for (int i = 0; i <= c.dim(); ++i) dims.push_back(c.size(i));
  j["dims"] = dims;
  Json cells = Json::array();
  for (int i = 0; i <= c.dim(); ++i)
    for (int cc = 0; cc < c.size(i); ++cc) {
      Json cell;
      cell["id"] = cc;
      cell["dim"] = i;
      cell["vertices"] = c.cells[i][cc].verts;
      cell["faces"] = c.cells[i][cc].facets;
      cells.push_back(cell);
    }
  j["simplices"] = cells;
  return j;
}

Json chain_to_json(const Chain& ch) {
  Json j;
  j["dim"] = ch.dim;
  Json entries = Json::array();
  for (auto& [cell, coeff] : ch.coeff) entries.push_back(Json::array({cell, coeff}));
  j["entries"] = entries;
  return j;
}

Json abgroup_to_json(const AbGroup& g) {
  Json j;
  j["free_rank"] = g.free_rank;
  Json tors = Json::array();
  for (auto& t : g.torsion) tors.push_back(t.get_str());
  j["torsion"] = tors;
  j["pretty"] = g.str();
  return j;
}

Json quotient_to_json(const QuotientComplex& qc, long long stab_element_cap) {
  Json j;
  j["group"] = {{"q", qc.group.q},
                {"d", qc.group.d},
                {"ideal", qc.group.modulus.str()},
                {"name", qc.group.str()}};
  j["alpha"] = qc.alpha;
  j["alpha_hi"] = qc.alpha_hi;
  j["active_bound"] = qc.active_bound;

  SubMask trunc = qc.truncation_mask(qc.alpha);
  Json orbits = Json::array();
  for (int v = 0; v < qc.complex.size(0); ++v) {
    const VertexOrbit& vo = qc.vertices[qc.orbit_of_complex_vertex[v]];
    Json o;
    o["id"] = v;
    o["dim"] = 0;
    o["rep_key"] = vo.rep_key.id;
    o["splitting_type"] = vo.type;
    o["stab_order"] = vo.stab_order;
    o["in_truncation"] = static_cast<bool>(trunc[0][v]);
    // collar = truncation vertex adjacent to a relative cell
    bool collar = false;
    if (trunc[0][v])
      for (int e = 0; e < qc.complex.size(1); ++e)
        if (!trunc[1][e])
          for (int w : qc.complex.cells[1][e].verts)
            if (w == v) collar = true;
    o["klass"] = trunc[0][v] ? (collar ? "collar" : "deep") : "core";
    if (vo.stab_order <= stab_element_cap) {
      Json elems = Json::array();
      for (auto& m : qc.vertex_stabilizer(qc.orbit_of_complex_vertex[v])) elems.push_back(mata_to_json(m));
      o["stab_elements"] = elems;
    }
    orbits.push_back(o);
  }
  j["vertices"] = orbits;

  for (int dim = 1; dim <= qc.complex.dim(); ++dim) {
    Json cells = Json::array();
    for (size_t c = 0; c < qc.cells[dim].size(); ++c) {
      const CellOrbit& cell = qc.cells[dim][c];
      Json o;
      o["id"] = static_cast<int>(c);
      o["dim"] = dim;
      o["verts"] = qc.complex.cells[dim][c].verts;
      o["faces"] = qc.complex.cells[dim][c].facets;
      o["rep_keys"] = cell.chain_keys;
      o["stab_order"] = cell.stab_order;
      o["in_truncation"] = static_cast<bool>(trunc[dim][c]);
      if (cell.stab_order <= stab_element_cap) {
        Json elems = Json::array();
        for (auto& m : qc.cell_stabilizer(dim, static_cast<int>(c))) elems.push_back(mata_to_json(m));
        o["stab_elements"] = elems;
      }
      cells.push_back(o);
    }
    j["cells_dim" + std::to_string(dim)] = cells;
  }
  return j;
}

std::string quotient_to_dot(const QuotientComplex& qc) {
  if (qc.group.d != 2) throw ConfigError("DOT export is for d = 2 quotient graphs");
  SubMask trunc = qc.truncation_mask(qc.alpha);
  std::string s = "graph quotient {\n";
  for (int v = 0; v < qc.complex.size(0); ++v) {
    const VertexOrbit& vo = qc.vertices[qc.orbit_of_complex_vertex[v]];
    s += "  v" + std::to_string(v) + " [label=\"" + std::to_string(vo.stab_order) + "\"";
    if (trunc[0][v]) s += " style=dashed";
    s += "];\n";
  }
  for (int e = 0; e < qc.complex.size(1); ++e) {
    const Cell& cell = qc.complex.cells[1][e];
    s += "  v" + std::to_string(cell.verts[0]) + " -- v" + std::to_string(cell.verts[1]) +
         " [label=\"" + std::to_string(qc.cells[1][e].stab_order) + "\"";
    if (trunc[1][e]) s += " style=dashed";
    s += "];\n";
  }
  s += "}\n";
  return s;
}

Json index_report_to_json(const IndexReport& rep, const MSLatticeResult& ms,
                          const BoundConstants& bc, int p) {
  Json j;
  j["rank_ok"] = rep.rank_ok;
  j["rank_homology"] = rep.rank_homology;
  j["rank_lattice"] = rep.rank_lattice;
  j["finite"] = rep.finite;
  j["index"] = rep.finite ? rep.index.get_str() : std::string("infinite");
  j["exponent"] = rep.finite ? rep.exponent.get_str() : std::string("infinite");
  Json divisors = Json::array();
  for (auto& t : rep.divisors) divisors.push_back(t.get_str());
  j["divisors"] = divisors;
  Int pe = 1;
  for (long long i = 0; i < bc.e; ++i) pe *= p;
  Int bound = pe * bc.big_n;
  j["bound"] = bound.get_str();
  j["bound_e"] = bc.e;
  j["bound_N"] = bc.big_n.get_str();
  bool divides = rep.finite && rep.exponent != 0 && bound % rep.exponent == 0;
  // p-part of the exponent must divide p^e when the group is p'-torsion free
  bool p_part_ok = true;
  if (rep.finite && rep.exponent != 0) {
    Int e = rep.exponent;
    Int ppart = 1;
    while (e % p == 0) {
      e /= p;
      ppart *= p;
    }
    p_part_ok = (pe % ppart == 0);
  }
  j["divides"] = divides;
  j["p_part_ok"] = p_part_ok;
  j["stabilized"] = ms.stabilized;
  j["stream"] = ms.provenance;
  j["symbols_computed"] = ms.symbols_computed;
  return j;
}

// ---------------------------------------------------------------------------
// structural validation
// ---------------------------------------------------------------------------

namespace {

void require(bool cond, const std::string& path) {
  if (!cond) throw Error("schema violation at " + path);
}

}  // namespace

void validate_quotient_json(const Json& j) {
  require(j.contains("group") && j["group"].is_object(), "group");
  for (const char* key : {"q", "d"}) require(j["group"].contains(key) && j["group"][key].is_number_integer(), std::string("group.") + key);
  require(j["group"].contains("ideal") && j["group"]["ideal"].is_string(), "group.ideal");
  require(j.contains("alpha") && j["alpha"].is_number_integer(), "alpha");
  require(j.contains("vertices") && j["vertices"].is_array(), "vertices");
  for (auto& v : j["vertices"]) {
    require(v.contains("rep_key") && v["rep_key"].is_string(), "vertices[].rep_key");
    require(v.contains("splitting_type") && v["splitting_type"].is_array(), "vertices[].splitting_type");
    require(v.contains("stab_order") && v["stab_order"].is_number_integer(), "vertices[].stab_order");
    require(v.contains("in_truncation") && v["in_truncation"].is_boolean(), "vertices[].in_truncation");
    if (v.contains("stab_elements")) require(v["stab_elements"].is_array(), "vertices[].stab_elements");
  }
  int d = j["group"]["d"].get<int>();
  for (int dim = 1; dim <= d - 1; ++dim) {
    std::string key = "cells_dim" + std::to_string(dim);
    require(j.contains(key) && j[key].is_array(), key);
    for (auto& c : j[key]) {
      require(c.contains("verts") && c["verts"].is_array() &&
                  static_cast<int>(c["verts"].size()) == dim + 1,
              key + "[].verts");
      require(c.contains("faces") && c["faces"].is_array(), key + "[].faces");
      require(c.contains("stab_order") && c["stab_order"].is_number_integer(), key + "[].stab_order");
    }
  }
}

void validate_verdict_json(const Json& j) {
  for (const char* key : {"rank_ok", "finite", "divides", "p_part_ok", "stabilized"})
    require(j.contains(key) && j[key].is_boolean(), key);
  for (const char* key : {"index", "exponent", "bound"})
    require(j.contains(key) && j[key].is_string(), key);
  require(j.contains("rank_homology") && j["rank_homology"].is_number_integer(), "rank_homology");
}

}  // namespace btq
