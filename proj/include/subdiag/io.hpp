#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "subdiag/algebra.hpp"
#include "subdiag/beurling.hpp"
#include "subdiag/suites.hpp"
#include "subdiag/types.hpp"

namespace subdiag {

// Ordered keys keep serialized reports byte-stable, which the determinism
// contract (same flags + seed, identical output) relies on.
using Json = nlohmann::ordered_json;

// Matrix files: {"n": int, "entries": [[[re, im], ...], ...]} row major.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

// Algebras: {"kind": "block_upper", "partition": [...]} or
// {"kind": "explicit", "n": int, "generators": [matrix, ...]}.
Json algebra_to_json(const TracialSubalgebra& alg);
TracialSubalgebra algebra_from_json(const Json& j);

// Subspaces: {"n": int, "basis": [matrix, ...]}.
Json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j);

Json report_to_json(const Report& report);

// Command line matrix arguments: "diag:1,4", "id:3", or a JSON file path.
CMatrix parse_matrix_arg(const std::string& arg);

// "2,1" and friends.
BlockPartition parse_partition(const std::string& csv);

// Whole file as bytes; throws InputError with the path on failure.
std::string read_text_file(const std::string& path);
Json json_from_file(const std::string& path);

// FNV-1a, used to echo input identities into command output.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace subdiag
