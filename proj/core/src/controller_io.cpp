#include "cfsyn/controller_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cfsyn {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kFormatTag = "cfsyn-controller-v1";

ordered_json rational_value(const Rational& q) {
  ordered_json v;
  v["dec"] = rat::to_decimal_string(q, 40);
  v["num"] = q.get_num().get_str();
  v["den"] = q.get_den().get_str();
  return v;
}

ordered_json vector_value(const RatVector& vec) {
  ordered_json arr = ordered_json::array();
  for (const Rational& q : vec) arr.push_back(rational_value(q));
  return arr;
}

ordered_json matrix_value(const RatMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(rational_value(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Rational parse_rational(const ordered_json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("num") || !v.contains("den"))
    throw std::runtime_error("invalid controller file: " + where +
                             " is not a {dec,num,den} value");
  try {
    mpz_class num(v.at("num").get<std::string>(), 10);
    mpz_class den(v.at("den").get<std::string>(), 10);
    if (den == 0)
      throw std::runtime_error("invalid controller file: " + where +
                               " has zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("invalid controller file: " + where +
                             " has a malformed integer string");
  }
}

RatVector parse_vector(const ordered_json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw std::runtime_error("invalid controller file: " + where +
                             " must be an array of length " + std::to_string(n));
  RatVector out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.push_back(parse_rational(v.at(i), where + "[" + std::to_string(i) + "]"));
  return out;
}

RatMatrix parse_matrix(const ordered_json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw std::runtime_error("invalid controller file: " + where +
                             " must be " + std::to_string(n) + " rows");
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const ordered_json& row = v.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::runtime_error("invalid controller file: " + where + " row " +
                               std::to_string(i) + " must have " +
                               std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j)
      m(i, j) = parse_rational(row.at(j), where + "[" + std::to_string(i) +
                                              "][" + std::to_string(j) + "]");
  }
  return m;
}

}  // namespace

std::string controller_to_json(const ControllerSpec& spec) {
  const ExactControllerData& data = spec.exact;
  ordered_json doc;
  doc["format"] = kFormatTag;
  doc["n"] = data.n;
  doc["d"] = rational_value(data.d);
  doc["a0"] = rational_value(data.a0);
  doc["a"] = vector_value(data.a);
  doc["F"] = matrix_value(data.F);
  doc["F_inv"] = matrix_value(data.F_inv);
  doc["C"] = matrix_value(data.C);
  ordered_json prov;
  prov["a_n"] = rational_value(data.a_n);
  prov["c_scale"] = rational_value(data.c_scale);
  prov["xi0"] = rational_value(data.xi0);
  prov["threshold"] = rational_value(data.threshold);
  doc["provenance"] = std::move(prov);
  return doc.dump(2) + "\n";
}

ControllerSpec controller_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("invalid controller file: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string()) != kFormatTag)
    throw std::runtime_error(
        "invalid controller file: missing format tag \"" +
        std::string(kFormatTag) + "\"");
  if (!doc.contains("n") || !doc.at("n").is_number_integer())
    throw std::runtime_error("invalid controller file: n must be an integer");

  ExactControllerData data;
  try {
    data.n = doc.at("n").get<int>();
    if (data.n < 2 || data.n > 64)
      throw std::runtime_error("invalid controller file: n out of range");
    data.d = parse_rational(doc.at("d"), "d");
    data.a0 = parse_rational(doc.at("a0"), "a0");
    if (data.d <= 0 || data.a0 <= 0)
      throw std::runtime_error(
          "invalid controller file: d and a0 must be positive");
    data.a = parse_vector(doc.at("a"), data.n, "a");
    data.F = parse_matrix(doc.at("F"), data.n, "F");
    data.F_inv = parse_matrix(doc.at("F_inv"), data.n, "F_inv");
    data.C = parse_matrix(doc.at("C"), data.n, "C");
    if (!doc.contains("provenance") || !doc.at("provenance").is_object())
      throw std::runtime_error("invalid controller file: missing provenance");
    const ordered_json& prov = doc.at("provenance");
    data.a_n = parse_rational(prov.at("a_n"), "provenance.a_n");
    data.c_scale = parse_rational(prov.at("c_scale"), "provenance.c_scale");
    data.xi0 = parse_rational(prov.at("xi0"), "provenance.xi0");
    data.threshold =
        parse_rational(prov.at("threshold"), "provenance.threshold");
  } catch (const nlohmann::json::exception& e) {
    // missing keys and type mismatches surface as one error family
    throw std::runtime_error(std::string("invalid controller file: ") +
                             e.what());
  }

  // Derived exact quantities are recomputed rather than stored, so a loaded
  // file cannot disagree with its own payload.
  const Rational quad = ratmat::dot(ratmat::mat_vec(data.F_inv, data.a), data.a);
  if (quad > 0) {
    data.a0_max = data.d * data.d / (2 * quad);
    data.control_sup_sq = 2 * data.a0 * quad;
  } else {
    // Degenerate payloads (e.g. hand-edited gains) still load; the verify
    // command is responsible for flagging them.
    data.a0_max = 0;
    data.control_sup_sq = 0;
  }
  return freeze_controller(data);
}

void save_controller(const ControllerSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << controller_to_json(spec);
  if (!out) throw std::runtime_error("failed to write " + path);
}

ControllerSpec load_controller(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return controller_from_json(buf.str());
}

std::string validity_report_to_json(const synthesis::ValidityReport& report) {
  ordered_json doc;
  doc["n"] = report.n;
  doc["a_n"] = rational_value(report.a_n);
  doc["a_n_defaulted"] = report.a_n_defaulted;
  doc["c_scale"] = rational_value(report.c_scale);
  doc["xi0"] = rational_value(report.xi0);
  doc["first_C_entry"] = rational_value(report.first_C_entry);
  doc["normalized_c11"] = rational_value(report.normalized_c11);
  doc["threshold"] = rational_value(report.threshold);
  doc["threshold_ok"] = report.threshold_ok;
  doc["C_pd"] = report.C_pd;
  doc["C1_pd"] = report.C1_pd;
  doc["F_pd"] = report.F_pd;
  doc["FHF_pd"] = report.FHF_pd;
  doc["rank_P"] = report.rank_P;
  doc["lyapunov_residual"] = report.lyapunov_residual;
  doc["pass"] = report.pass();
  ordered_json fails = ordered_json::array();
  for (const std::string& f : report.failures()) fails.push_back(f);
  doc["failures"] = std::move(fails);
  return doc.dump(2) + "\n";
}

}  // namespace cfsyn
