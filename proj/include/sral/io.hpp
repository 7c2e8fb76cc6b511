#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sral/elementary.hpp"
#include "sral/errors.hpp"
#include "sral/families.hpp"
#include "sral/linalg.hpp"
#include "sral/ordered_pair.hpp"
#include "sral/radical.hpp"
#include "sral/triangularize.hpp"

namespace sral {
namespace io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return j;
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

inline double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
  return v;
}

inline json matrix_to_json(const CMatrix& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      row.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(rows)}};
}

inline CMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ParseError(where + ": expected {rows, cols, data}");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw ParseError(where + ": rows/cols must be integers");
  Eigen::Index r = j["rows"].get<Eigen::Index>();
  Eigen::Index c = j["cols"].get<Eigen::Index>();
  if (r < 1 || c < 1) throw ParseError(where + ": empty shape");
  const json& data = j["data"];
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != r)
    throw ParseError(where + ": data must have `rows` rows");
  CMatrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = data[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw ParseError(where + ": row length mismatch");
    for (Eigen::Index k = 0; k < c; ++k) {
      const json& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_array() || cell.size() != 2)
        throw ParseError(where + ": entries must be [re, im]");
      a(i, k) = Complex(finite_number(cell[0], where), finite_number(cell[1], where));
    }
  }
  return a;
}

inline json family_to_json(const families::SummableFamily& m) {
  json members = json::array();
  for (const CMatrix& a : m.members) members.push_back(matrix_to_json(a));
  json j{{"dimension", m.members.empty() ? 0 : m.members.front().rows()},
         {"members", std::move(members)}};
  if (!m.multiplicities.empty()) j["multiplicities"] = m.multiplicities;
  return j;
}

inline families::SummableFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("members"))
    throw ParseError("family: expected {dimension, members}");
  families::SummableFamily m;
  for (const json& e : j["members"]) m.members.push_back(matrix_from_json(e, "family member"));
  if (j.contains("multiplicities")) {
    if (!j["multiplicities"].is_array()) throw ParseError("family: multiplicities");
    for (const json& e : j["multiplicities"]) {
      if (!e.is_number_integer()) throw ParseError("family: multiplicities must be integers");
      m.multiplicities.push_back(e.get<long long>());
    }
  }
  families::validate(m);
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer()) throw ParseError("family: dimension");
    if (j["dimension"].get<Eigen::Index>() != families::dim_of(m.members, "family"))
      throw ParseError("family: dimension field disagrees with members");
  }
  return m;
}

inline families::BoundedFamily bounded_from_json(const json& j) {
  if (!j.is_object() || !j.contains("members"))
    throw ParseError("family: expected {dimension, members}");
  families::BoundedFamily k;
  for (const json& e : j["members"]) k.members.push_back(matrix_from_json(e, "family member"));
  families::validate(k);
  if (j.contains("dimension") &&
      j["dimension"].get<Eigen::Index>() != families::dim_of(k.members, "family"))
    throw ParseError("family: dimension field disagrees with members");
  return k;
}

inline json bracket_to_json(const families::RadiusBracket& b) {
  return json{{"lower", b.lower},
              {"upper", b.upper},
              {"lower_witness", b.lower_witness},
              {"upper_depth", b.upper_depth},
              {"certified", b.certified}};
}

inline json elem_to_json(const elem::ElementaryOperator& t) {
  json terms = json::array();
  for (const elem::ElemTerm& e : t.terms)
    terms.push_back(json{{"a", matrix_to_json(e.a)},
                         {"b", matrix_to_json(e.b)},
                         {"a_compact", e.a_compact},
                         {"b_compact", e.b_compact}});
  return json{{"m", t.m}, {"n", t.n}, {"terms", std::move(terms)}};
}

inline elem::ElementaryOperator elem_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("terms"))
    throw ParseError("elementary operator: expected {m, n, terms}");
  elem::ElementaryOperator t;
  t.m = j["m"].get<Eigen::Index>();
  t.n = j["n"].get<Eigen::Index>();
  if (!j["terms"].is_array()) throw ParseError("elementary operator: terms");
  for (const json& e : j["terms"]) {
    if (!e.is_object() || !e.contains("a") || !e.contains("b"))
      throw ParseError("elementary operator: term needs a and b");
    elem::ElemTerm term;
    term.a = matrix_from_json(e["a"], "term a");
    term.b = matrix_from_json(e["b"], "term b");
    term.a_compact = e.value("a_compact", false);
    term.b_compact = e.value("b_compact", false);
    t.terms.push_back(std::move(term));
  }
  elem::validate(t);
  return t;
}

struct AlgebraInput {
  std::vector<CMatrix> generators;
  bool unital = true;
};

inline AlgebraInput algebra_from_json(const json& j) {
  if (!j.is_object() || !j.contains("generators"))
    throw ParseError("algebra: expected {dimension, generators, unital}");
  AlgebraInput in;
  for (const json& e : j["generators"])
    in.generators.push_back(matrix_from_json(e, "generator"));
  if (in.generators.empty()) throw ParseError("algebra: no generators");
  in.unital = j.value("unital", true);
  if (j.contains("dimension") &&
      j["dimension"].get<Eigen::Index>() != in.generators.front().rows())
    throw ParseError("algebra: dimension field disagrees with generators");
  return in;
}

inline json chain_to_json(const tri::SubspaceChain& c) {
  json bases = json::array();
  for (const CMatrix& b : c.bases) {
    json cols = json::array();
    for (Eigen::Index i = 0; i < b.cols(); ++i)
      cols.push_back(matrix_to_json(CMatrix(b.col(i))));
    bases.push_back(std::move(cols));
  }
  return json{{"dimension", c.dimension}, {"bases", std::move(bases)}};
}

inline tri::SubspaceChain chain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("bases"))
    throw ParseError("chain: expected {dimension, bases}");
  tri::SubspaceChain c;
  c.dimension = j["dimension"].get<Eigen::Index>();
  for (const json& basis : j["bases"]) {
    if (!basis.is_array() || basis.empty()) throw ParseError("chain: empty basis");
    CMatrix b(c.dimension, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CMatrix col = matrix_from_json(basis[i], "chain column");
      if (col.cols() != 1 || col.rows() != c.dimension)
        throw ParseError("chain: columns must be dimension x 1");
      b.col(static_cast<Eigen::Index>(i)) = col.col(0);
    }
    c.bases.push_back(std::move(b));
  }
  tri::validate(c);
  return c;
}

struct CurveSamples {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<CMatrix> samples;
};

inline CurveSamples curve_from_json(const json& j) {
  if (!j.is_object() || !j.contains("interval") || !j.contains("samples"))
    throw ParseError("curve: expected {interval, samples}");
  const json& iv = j["interval"];
  if (!iv.is_array() || iv.size() != 2) throw ParseError("curve: interval must be [alpha, beta]");
  CurveSamples c;
  c.alpha = finite_number(iv[0], "curve interval");
  c.beta = finite_number(iv[1], "curve interval");
  for (const json& e : j["samples"]) c.samples.push_back(matrix_from_json(e, "curve sample"));
  if (c.samples.empty()) throw ParseError("curve: no samples");
  return c;
}

inline std::string decay_csv(const std::vector<tri::DecayRow>& rows) {
  std::ostringstream out;
  out << "m,count_enumerated,max_norm,root\n";
  for (const tri::DecayRow& r : rows)
    out << r.m << ',' << format_double(r.count_enumerated) << ',' << format_double(r.max_norm)
        << ',' << format_double(r.root) << '\n';
  return out.str();
}

inline json qmod_to_json(const radical::QmodReport& r) {
  return json{{"rates", r.rates},
              {"inf_rate", r.inf_rate},
              {"epsilon_certificates", [&] {
                 json arr = json::array();
                 for (const auto& [eps, n0] : r.epsilon_certificate)
                   arr.push_back(json{{"epsilon", eps}, {"n0", n0}});
                 return arr;
               }()}};
}

inline json inclusion_to_json(const elem::InclusionReport& r) {
  return json{{"hypothesis_satisfied", r.hypothesis_satisfied},
              {"sum_distance", r.sum_distance},
              {"prod_distance", r.prod_distance},
              {"sum_ok", r.sum_ok},
              {"prod_ok", r.prod_ok}};
}

inline json engel_to_json(const elem::StrongEngelReport& r) {
  return json{{"hypothesis_satisfied", r.hypothesis_satisfied},
              {"hausdorff", r.hausdorff},
              {"inclusion_ok", r.inclusion_ok}};
}

inline json run_to_json(const opair::SpectralSubspaceRun& r) {
  return json{{"t", r.t},
              {"epsilon", r.epsilon},
              {"z_x_norm", r.z_x_norm},
              {"z_y_norm", r.z_y_norm},
              {"bound_constant", r.bound_constant},
              {"y_norm_bound", r.y_norm_bound},
              {"series_partial_sums", r.series_partial_sums},
              {"partial_sum_residuals", r.partial_sum_residuals},
              {"verdict", r.verdict}};
}

}  // namespace io
}  // namespace sral
