#include "sinepalm/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sinepalm {

namespace {

double real_field(const json& j, const char* what) {
  if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
  return j.get<double>();
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::vector<double> real_list(const json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(real_field(v, what));
  return out;
}

std::array<double, 2> pair_field(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument(std::string(what) + " entries must be [a, b] pairs");
  return {real_field(j[0], what), real_field(j[1], what)};
}

}  // namespace

json to_json(const UnitCircleMeasure& mu) {
  return json{{"angles", mu.angles()}, {"weights", mu.weights()}};
}

UnitCircleMeasure measure_from_json(const json& j) {
  return UnitCircleMeasure(real_list(member(j, "angles"), "angles"),
                           real_list(member(j, "weights"), "weights"));
}

json to_json(const CoefficientSequence& seq) {
  json values = json::array();
  for (cplx c : seq.values()) values.push_back({c.real(), c.imag()});
  return json{{"kind", seq.kind() == CoefficientKind::verblunsky ? "verblunsky" : "modified"},
              {"values", values}};
}

CoefficientSequence coefficients_from_json(const json& j) {
  const json& kind = member(j, "kind");
  if (!kind.is_string()) throw std::invalid_argument("kind must be a string");
  CoefficientKind k;
  if (kind == "verblunsky") {
    k = CoefficientKind::verblunsky;
  } else if (kind == "modified") {
    k = CoefficientKind::modified;
  } else {
    throw std::invalid_argument("kind must be 'verblunsky' or 'modified'");
  }
  const json& values = member(j, "values");
  if (!values.is_array()) throw std::invalid_argument("values must be an array");
  std::vector<cplx> out;
  for (const json& v : values) {
    const auto p = pair_field(v, "values");
    out.emplace_back(p[0], p[1]);
  }
  return CoefficientSequence(k, std::move(out));
}

json to_json(const DiracOperator& op) {
  json path = json::array();
  for (const CellPoint& p : op.path()) path.push_back({p.x, p.y});
  json u1;
  if (op.u1()(0) == 1.0 && op.u1()(1) == 0.0) {
    u1 = "infinity";
  } else {
    u1 = {op.u1()(0), op.u1()(1)};
  }
  return json{{"grid", op.grid()},
              {"path", path},
              {"u0", {op.u0()(0), op.u0()(1)}},
              {"u1", u1},
              {"origin", to_string(op.origin())}};
}

DiracOperator operator_from_json(const json& j) {
  std::vector<double> grid = real_list(member(j, "grid"), "grid");
  const json& pj = member(j, "path");
  if (!pj.is_array()) throw std::invalid_argument("path must be an array");
  std::vector<CellPoint> path;
  for (const json& v : pj) {
    const auto p = pair_field(v, "path");
    path.push_back({p[0], p[1]});
  }
  const auto u0 = pair_field(member(j, "u0"), "u0");
  const json& u1j = member(j, "u1");
  Vec2 u1(1.0, 0.0);
  if (u1j.is_string()) {
    if (u1j != "infinity") throw std::invalid_argument("u1 must be [a, b] or \"infinity\"");
  } else {
    const auto p = pair_field(u1j, "u1");
    u1 = Vec2(p[0], p[1]);
  }
  Origin origin = Origin::custom;
  if (j.contains("origin")) origin = origin_from_string(j.at("origin").get<std::string>());
  const Vec2 v0(u0[0], u0[1]);
  // Files written by this library are already normalized; keep their bits.
  const bool keep = boundary_vectors_normalized(v0, u1);
  return DiracOperator(std::move(grid), std::move(path), v0, u1, origin, !keep);
}

json to_json(const SpectralMeasure& s) {
  json atoms = json::array();
  for (const auto& [lam, w] : s.atoms) atoms.push_back({lam, w});
  return json{{"side", to_string(s.side)}, {"window", {s.a, s.b}}, {"atoms", atoms}};
}

SpectralMeasure spectrum_from_json(const json& j) {
  SpectralMeasure s;
  s.side = side_from_string(member(j, "side").get<std::string>());
  const auto w = pair_field(member(j, "window"), "window");
  s.a = w[0];
  s.b = w[1];
  const json& atoms = member(j, "atoms");
  if (!atoms.is_array()) throw std::invalid_argument("atoms must be an array");
  for (const json& a : atoms) {
    const auto p = pair_field(a, "atoms");
    s.atoms.emplace_back(p[0], p[1]);
  }
  return s;
}

json to_json(const TestReport& r) {
  return json{{"name", r.name},
              {"statistic", r.statistic},
              {"threshold", r.threshold},
              {"sample_size", r.sample_size},
              {"pass", r.pass},
              {"notes", r.notes}};
}

TestReport report_from_json(const json& j) {
  TestReport r;
  r.name = member(j, "name").get<std::string>();
  r.statistic = member(j, "statistic").is_null() ? NAN : member(j, "statistic").get<double>();
  r.threshold = member(j, "threshold").is_null() ? NAN : member(j, "threshold").get<double>();
  r.sample_size = member(j, "sample_size").get<std::size_t>();
  r.pass = member(j, "pass").get<bool>();
  r.notes = j.value("notes", std::string());
  return r;
}

json aggregate_report(const std::string& suite, std::uint64_t seed,
                      const std::vector<TestReport>& reports) {
  json list = json::array();
  bool all = true;
  for (const TestReport& r : reports) {
    list.push_back(to_json(r));
    all = all && r.pass;
  }
  return json{{"suite", suite}, {"seed", seed}, {"pass", all}, {"reports", list}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CSV header is empty");
  append_row(header);
}

void CsvWriter::add_row(const std::vector<CsvCell>& row) {
  if (row.size() != columns_) throw std::invalid_argument("CSV row width differs from header");
  std::vector<std::string> fields;
  fields.reserve(row.size());
  for (const CsvCell& c : row) {
    if (const auto* s = std::get_if<std::string>(&c)) {
      fields.push_back(*s);
    } else if (const auto* d = std::get_if<double>(&c)) {
      fields.push_back(format_double(*d));
    } else {
      fields.push_back(std::to_string(std::get<long long>(c)));
    }
  }
  append_row(fields);
}

void CsvWriter::append_field(std::string_view field) {
  const bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) {
    text_.append(field);
    return;
  }
  text_.push_back('"');
  for (char c : field) {
    if (c == '"') text_.push_back('"');
    text_.push_back(c);
  }
  text_.push_back('"');
}

void CsvWriter::append_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) text_.push_back(',');
    append_field(fields[i]);
  }
  text_.append("\r\n");
}

}  // namespace sinepalm
