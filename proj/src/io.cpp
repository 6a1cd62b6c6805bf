#include "subdiag/io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace subdiag {

namespace {

double number_at(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string("expected a number for ") + what);
  return j.get<double>();
}

std::vector<double> parse_reals(const std::string& csv, const std::string& context) {
  std::vector<double> vals;
  std::istringstream is(csv);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(context + ": bad number '" + item + "'");
    }
  }
  if (vals.empty()) throw InputError(context + ": empty list");
  return vals;
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
  Json entries = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    entries.push_back(std::move(row));
  }
  return Json{{"n", m.rows()}, {"entries", std::move(entries)}};
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
    throw InputError("matrix object needs fields 'n' and 'entries'");
  const int n = j["n"].get<int>();
  if (n <= 0) throw InputError("matrix dimension must be positive");
  const Json& entries = j["entries"];
  if (!entries.is_array() || static_cast<int>(entries.size()) != n)
    throw InputError("matrix 'entries' must hold n rows");
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& row = entries[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw InputError("matrix row has the wrong length");
    for (int c = 0; c < n; ++c) {
      const Json& cell = row[c];
      if (!cell.is_array() || cell.size() != 2)
        throw InputError("matrix entries must be [re, im] pairs");
      m(i, c) = Complex(number_at(cell[0], "entry real part"),
                        number_at(cell[1], "entry imaginary part"));
    }
  }
  return m;
}

Json algebra_to_json(const TracialSubalgebra& alg) {
  if (alg.is_block()) {
    Json part = Json::array();
    for (int b = 0; b < alg.partition().blocks(); ++b)
      part.push_back(alg.partition().block_size(b));
    return Json{{"kind", "block_upper"}, {"partition", std::move(part)}};
  }
  Json gens = Json::array();
  for (const CMatrix& b : alg.basis()) gens.push_back(matrix_to_json(b));
  return Json{{"kind", "explicit"}, {"n", alg.n()}, {"generators", std::move(gens)}};
}

TracialSubalgebra algebra_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InputError("algebra object needs a 'kind' field");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "block_upper") {
    if (!j.contains("partition") || !j["partition"].is_array())
      throw InputError("block_upper algebra needs a 'partition' array");
    std::vector<int> sizes;
    for (const Json& s : j["partition"]) sizes.push_back(s.get<int>());
    return TracialSubalgebra::block_upper(BlockPartition(sizes));
  }
  if (kind == "explicit") {
    if (!j.contains("n") || !j.contains("generators"))
      throw InputError("explicit algebra needs 'n' and 'generators'");
    std::vector<CMatrix> gens;
    for (const Json& g : j["generators"]) gens.push_back(matrix_from_json(g));
    return TracialSubalgebra::explicit_span(j["n"].get<int>(), gens);
  }
  throw InputError("unknown algebra kind: " + kind);
}

Json subspace_to_json(const Subspace& s) {
  Json basis = Json::array();
  for (const CMatrix& b : s.basis) basis.push_back(matrix_to_json(b));
  return Json{{"n", s.n}, {"basis", std::move(basis)}};
}

Subspace subspace_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("basis"))
    throw InputError("subspace object needs fields 'n' and 'basis'");
  const int n = j["n"].get<int>();
  std::vector<CMatrix> spanning;
  for (const Json& b : j["basis"]) {
    spanning.push_back(matrix_from_json(b));
    if (spanning.back().rows() != n) throw InputError("subspace basis dimension mismatch");
  }
  return make_subspace(n, spanning);
}

Json report_to_json(const Report& report) {
  Json suites = Json::array();
  for (const SuiteResult& s : report.suites) {
    suites.push_back(Json{{"name", s.name},
                          {"theorem", s.theorem},
                          {"instances", s.instances},
                          {"passes", s.passes},
                          {"failures", s.failures},
                          {"max_residual", s.max_residual},
                          {"elapsed_ms", s.elapsed_ms}});
  }
  return Json{{"version", report.version}, {"rng", report.rng},
              {"seed", report.seed},       {"algebra", report.algebra},
              {"suites", std::move(suites)}, {"overall", report.overall}};
}

CMatrix parse_matrix_arg(const std::string& arg) {
  if (arg.rfind("diag:", 0) == 0) {
    const std::vector<double> vals = parse_reals(arg.substr(5), "diag shorthand");
    CMatrix m = CMatrix::Zero(vals.size(), vals.size());
    for (size_t i = 0; i < vals.size(); ++i) m(i, i) = vals[i];
    return m;
  }
  if (arg.rfind("id:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(arg.substr(3));
    } catch (const std::exception&) {
      throw InputError("id shorthand: bad dimension '" + arg.substr(3) + "'");
    }
    if (n <= 0) throw InputError("id shorthand: dimension must be positive");
    return CMatrix::Identity(n, n);
  }
  return matrix_from_json(json_from_file(arg));
}

BlockPartition parse_partition(const std::string& csv) {
  std::vector<int> sizes;
  for (double v : parse_reals(csv, "partition")) {
    const int s = static_cast<int>(v);
    if (s <= 0 || static_cast<double>(s) != v)
      throw InputError("partition entries must be positive integers");
    sizes.push_back(s);
  }
  return BlockPartition(sizes);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json json_from_file(const std::string& path) {
  const std::string text = read_text_file(path);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("malformed JSON in " + path);
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace subdiag
