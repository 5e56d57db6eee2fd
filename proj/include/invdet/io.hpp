#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "invdet/contour.hpp"
#include "invdet/errors.hpp"
#include "invdet/matrix.hpp"
#include "invdet/series.hpp"

namespace invdet {

// All numeric output goes through this: 17 significant digits, which
// round-trips doubles exactly and keeps repeated runs byte-identical.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix JSON: {"k": <int>, "re": [[...]], "im": [[...]]}, row-major k x k,
// both arrays mandatory, entries finite.
// ---------------------------------------------------------------------------

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("matrix json must be an object");
  if (!j.contains("k") || !j.contains("re") || !j.contains("im"))
    throw ParseError("matrix json requires fields k, re, im");
  if (!j["k"].is_number_integer())
    throw ParseError("matrix field k must be an integer");
  const int k = j["k"].get<int>();
  if (k < 1) throw ParseError("matrix order k must be >= 1");
  auto read_plane = [&](const char* name) {
    const nlohmann::json& p = j[name];
    if (!p.is_array() || static_cast<int>(p.size()) != k)
      throw ParseError(std::string(name) + " must be a k x k array");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k) * k);
    for (const auto& row : p) {
      if (!row.is_array() || static_cast<int>(row.size()) != k)
        throw ParseError(std::string(name) + " must be a k x k array");
      for (const auto& v : row) {
        if (!v.is_number()) throw ParseError("matrix entries must be numbers");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ParseError("matrix entries must be finite");
        out.push_back(d);
      }
    }
    return out;
  };
  const std::vector<double> re = read_plane("re");
  const std::vector<double> im = read_plane("im");
  std::vector<Complex> entries(static_cast<std::size_t>(k) * k);
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i] = Complex{re[i], im[i]};
  return ComplexMatrix(k, std::move(entries));
}

inline ComplexMatrix parse_matrix_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid json");
  return matrix_from_json(j);
}

inline ComplexMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix_json(ss.str());
}

inline std::string matrix_to_json(const ComplexMatrix& m) {
  const int k = m.order();
  std::string out = "{\"k\":" + std::to_string(k) + ",\"re\":[";
  auto plane = [&](bool real) {
    std::string p;
    for (int r = 0; r < k; ++r) {
      p += r == 0 ? "[" : ",[";
      for (int c = 0; c < k; ++c) {
        if (c) p += ",";
        p += fmt17(real ? m(r, c).real() : m(r, c).imag());
      }
      p += "]";
    }
    return p;
  };
  out += plane(true) + "],\"im\":[" + plane(false) + "]}";
  return out;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline std::string complex_to_json(Complex z) {
  return "{\"re\":" + fmt17(z.real()) + ",\"im\":" + fmt17(z.imag()) + "}";
}

inline std::string gate_to_json(const GateStatus& g) {
  std::string out = "{\"norm_of_deviation\":" + fmt17(g.norm_of_deviation);
  out += ",\"threshold\":" + fmt17(g.threshold);
  out += std::string(",\"inside_strict\":") + (g.inside_strict ? "true" : "false");
  out += std::string(",\"inside_closed\":") + (g.inside_closed ? "true" : "false");
  return out + "}";
}

inline std::string series_report_to_json(const SeriesReport& rep) {
  std::string out = "{\"method\":\"";
  out += to_string(rep.method);
  out += "\",\"orders\":[";
  for (std::size_t i = 0; i < rep.orders.size(); ++i) {
    const SeriesOrder& o = rep.orders[i];
    if (i) out += ",";
    out += "{\"degree\":" + std::to_string(o.degree);
    out += ",\"re\":" + fmt17(o.partial_sum.real());
    out += ",\"im\":" + fmt17(o.partial_sum.imag());
    out += ",\"terms\":" + std::to_string(o.terms_added) + "}";
  }
  out += "],\"final\":" + complex_to_json(rep.final_value) + "}";
  return out;
}

inline std::string quad_result_to_json(const QuadResult& q) {
  std::string out = "{\"value\":" + complex_to_json(q.value);
  out += ",\"n\":" + std::to_string(q.nodes_per_dim);
  out += ",\"evaluations\":" + std::to_string(q.evaluations);
  out += ",\"refinement_delta\":";
  out += q.refinement_delta ? fmt17(*q.refinement_delta) : std::string("null");
  return out + "}";
}

// ---------------------------------------------------------------------------
// CLI-facing result types
// ---------------------------------------------------------------------------

// One evaluated reciprocal determinant with its provenance.
struct EvalResult {
  std::string method;
  int k = 0;
  Complex value{0.0, 0.0};
  GateStatus gate;
  std::optional<long long> order;    // series truncation degree
  std::optional<long long> nodes;    // quadrature nodes per dimension
  std::optional<double> estimated_error;
  std::optional<Complex> oracle;     // 1/lu_det reference when cheap
  std::optional<double> oracle_deviation;
};

inline std::string to_json(const EvalResult& r) {
  std::string out = "{\"method\":\"" + json_escape(r.method) + "\"";
  out += ",\"k\":" + std::to_string(r.k);
  out += ",\"value\":" + complex_to_json(r.value);
  out += ",\"gate\":" + gate_to_json(r.gate);
  out += ",\"order\":" + (r.order ? std::to_string(*r.order) : "null");
  out += ",\"nodes\":" + (r.nodes ? std::to_string(*r.nodes) : "null");
  out += ",\"estimated_error\":" +
         (r.estimated_error ? fmt17(*r.estimated_error) : "null");
  out += ",\"oracle\":" + (r.oracle ? complex_to_json(*r.oracle) : "null");
  out += ",\"oracle_deviation\":" +
         (r.oracle_deviation ? fmt17(*r.oracle_deviation) : "null");
  return out + "}";
}

inline std::string to_csv(const EvalResult& r) {
  std::string out =
      "method,k,re,im,gate_norm,gate_threshold,inside_strict,inside_closed,"
      "order,nodes,estimated_error,oracle_deviation\n";
  out += r.method + "," + std::to_string(r.k);
  out += "," + fmt17(r.value.real()) + "," + fmt17(r.value.imag());
  out += "," + fmt17(r.gate.norm_of_deviation) + "," + fmt17(r.gate.threshold);
  out += std::string(",") + (r.gate.inside_strict ? "true" : "false");
  out += std::string(",") + (r.gate.inside_closed ? "true" : "false");
  out += "," + (r.order ? std::to_string(*r.order) : std::string());
  out += "," + (r.nodes ? std::to_string(*r.nodes) : std::string());
  out += "," + (r.estimated_error ? fmt17(*r.estimated_error) : std::string());
  out += "," + (r.oracle_deviation ? fmt17(*r.oracle_deviation) : std::string());
  return out + "\n";
}

struct ConvergenceRow {
  long long index = 0;
  Complex value{0.0, 0.0};
  double abs_error = 0.0;
};

inline std::string to_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "index,re,im,abs_error\n";
  for (const ConvergenceRow& r : rows) {
    out += std::to_string(r.index) + "," + fmt17(r.value.real()) + "," +
           fmt17(r.value.imag()) + "," + fmt17(r.abs_error) + "\n";
  }
  return out;
}

inline std::string to_json(const std::vector<ConvergenceRow>& rows) {
  std::string out = "{\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out += ",";
    out += "{\"index\":" + std::to_string(rows[i].index);
    out += ",\"re\":" + fmt17(rows[i].value.real());
    out += ",\"im\":" + fmt17(rows[i].value.imag());
    out += ",\"abs_error\":" + fmt17(rows[i].abs_error) + "}";
  }
  return out + "]}";
}

}  // namespace invdet
