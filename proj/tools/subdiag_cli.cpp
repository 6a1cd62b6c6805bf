// Command line front end: verification suites plus one command per core
// operation, all emitting JSON on stdout.  Exit codes: 0 success, 1 a suite
// failed, 2 malformed input or flags, 3 violated mathematical precondition.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/LU>

#include "subdiag/algebra.hpp"
#include "subdiag/beurling.hpp"
#include "subdiag/factor.hpp"
#include "subdiag/fkdet.hpp"
#include "subdiag/io.hpp"
#include "subdiag/matcore.hpp"
#include "subdiag/suites.hpp"
#include "subdiag/szego.hpp"

namespace {

using subdiag::CMatrix;
using subdiag::Json;

std::string hex_hash(const Json& j) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(subdiag::fnv1a(j.dump())));
  return std::string(buf);
}

// Inputs are echoed by content hash so a report can be tied to its inputs
// regardless of whether they arrived as files or shorthands.
Json input_block(const CMatrix& m) {
  const Json j = subdiag::matrix_to_json(m);
  return Json{{"hash", hex_hash(j)}, {"n", m.rows()}};
}

void emit(const Json& j, const std::string& json_out) {
  const std::string text = j.dump(2);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary);
    if (!out) throw subdiag::InputError("cannot write file: " + json_out);
    out << text << "\n";
  }
  std::cout << text << "\n";
}

// Shared algebra selection: an explicit file wins, otherwise a partition
// string, otherwise all-ones of dimension n.
struct AlgebraArgs {
  std::string file;
  std::string partition;
  int n = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--algebra", file, "algebra JSON file");
    cmd->add_option("--partition", partition, "block sizes, e.g. 2,1");
    cmd->add_option("--n", n, "dimension; implies partition 1,1,...,1");
  }

  subdiag::TracialSubalgebra resolve(int required_n = 0) const {
    subdiag::TracialSubalgebra alg = [&] {
      if (!file.empty()) return subdiag::algebra_from_json(subdiag::json_from_file(file));
      if (!partition.empty())
        return subdiag::TracialSubalgebra::block_upper(subdiag::parse_partition(partition));
      const int dim = n > 0 ? n : (required_n > 0 ? required_n : 3);
      return subdiag::TracialSubalgebra::block_upper(
          subdiag::BlockPartition(std::vector<int>(dim, 1)));
    }();
    if (n > 0 && alg.n() != n)
      throw subdiag::InputError("--n disagrees with the algebra dimension");
    if (required_n > 0 && alg.n() != required_n)
      throw subdiag::InputError("matrix dimension disagrees with the algebra");
    return alg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification toolkit for block upper triangular trace algebras"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "run verification suites and emit a report");
  // frees the short name so --h can alias --matrix below
  verify->set_help_flag("--help", "print this help message and exit");
  std::vector<std::string> suites{"all"};
  verify->add_option("--suite", suites, "suite names or 'all'");
  AlgebraArgs verify_alg;
  verify_alg.attach(verify);
  std::uint64_t verify_seed = 1;
  verify->add_option("--seed", verify_seed, "root seed");
  subdiag::SuiteOptions suite_opts;
  verify->add_option("--trials", suite_opts.trials, "instances per suite");
  std::string verify_matrix;
  verify->add_option("--matrix,--h", verify_matrix,
                     "fixed weight for the szego suites, file or shorthand");
  verify->add_option("--p", suite_opts.p, "exponent p for riesz and szego-lp");
  verify->add_option("--q", suite_opts.q, "exponent q for riesz and szego-lp");
  verify->add_option("--tol.opt", suite_opts.opt_tol, "allowed optimizer gap");
  verify->add_option("--tol.det", suite_opts.det_floor, "relative determinant floor");
  verify->add_option("--opt.restarts", suite_opts.szego.restarts, "optimizer restarts");
  verify->add_option("--opt.max-iters", suite_opts.szego.max_iters, "optimizer iteration cap");
  std::string verify_out;
  verify->add_option("--json", verify_out, "also write the report to this file");

  // det
  auto* det = app.add_subcommand("det", "normalized determinant of a matrix");
  std::string det_matrix;
  det->add_option("--matrix", det_matrix, "matrix file or shorthand")->required();
  std::string det_out;
  det->add_option("--json", det_out, "also write the output to this file");

  // factor
  auto* factor = app.add_subcommand("factor", "canonical positive factorization b = r* r");
  std::string factor_matrix;
  factor->add_option("--matrix", factor_matrix, "matrix file or shorthand")->required();
  AlgebraArgs factor_alg;
  factor_alg.attach(factor);
  std::string factor_out;
  factor->add_option("--json", factor_out, "also write the output to this file");

  // innerouter
  auto* innerouter = app.add_subcommand("innerouter", "factor f = u h, u unitary, h outer");
  std::string io_matrix;
  innerouter->add_option("--matrix", io_matrix, "matrix file or shorthand")->required();
  AlgebraArgs io_alg;
  io_alg.attach(innerouter);
  std::string io_out;
  innerouter->add_option("--json", io_out, "also write the output to this file");

  // szego
  auto* szego = app.add_subcommand("szego", "constrained trace minimization against det");
  std::string szego_matrix;
  szego->add_option("--matrix", szego_matrix, "positive weight, file or shorthand")->required();
  AlgebraArgs szego_alg;
  szego_alg.attach(szego);
  std::string szego_form = "l2";
  szego->add_option("--form", szego_form, "l2, lp, or two-sided")
      ->check(CLI::IsMember({"l2", "lp", "two-sided"}));
  double szego_p = 2.0, szego_q = 1.0;
  szego->add_option("--p", szego_p, "exponent p");
  szego->add_option("--q", szego_q, "exponent q (two-sided form)");
  std::uint64_t szego_seed = 1;
  szego->add_option("--seed", szego_seed, "optimizer seed");
  subdiag::SzegoOptions szego_opts;
  szego->add_option("--opt.restarts", szego_opts.restarts, "optimizer restarts");
  szego->add_option("--opt.max-iters", szego_opts.max_iters, "optimizer iteration cap");
  std::string szego_out;
  szego->add_option("--json", szego_out, "also write the output to this file");

  // beurling
  auto* beurling = app.add_subcommand("beurling", "decompose a right invariant subspace");
  std::string beurling_subspace;
  beurling->add_option("--subspace", beurling_subspace, "subspace JSON file");
  AlgebraArgs beurling_alg;
  beurling_alg.attach(beurling);
  std::uint64_t beurling_seed = 1;
  beurling->add_option("--seed", beurling_seed, "seed when generating a subspace");
  int beurling_gens = 2;
  beurling->add_option("--generators", beurling_gens, "generators when no file is given");
  std::string beurling_out;
  beurling->add_option("--json", beurling_out, "also write the output to this file");

  // riesz
  auto* riesz = app.add_subcommand("riesz", "split x = y z with z outer, |z|^q = |x|^r");
  std::string riesz_matrix;
  riesz->add_option("--matrix", riesz_matrix, "matrix file or shorthand")->required();
  AlgebraArgs riesz_alg;
  riesz_alg.attach(riesz);
  double riesz_p = 2.0, riesz_q = 2.0, riesz_r = 0.0;
  riesz->add_option("--p", riesz_p, "exponent p");
  riesz->add_option("--q", riesz_q, "exponent q");
  riesz->add_option("--r", riesz_r, "exponent r; checked against 1/r = 1/p + 1/q");
  std::string riesz_out;
  riesz->add_option("--json", riesz_out, "also write the output to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      const subdiag::TracialSubalgebra alg = verify_alg.resolve();
      if (!verify_matrix.empty())
        suite_opts.weight = subdiag::parse_matrix_arg(verify_matrix);
      for (std::string& name : suites)
        if (name == "structure") name = "structure-checks";
      const subdiag::Report report =
          subdiag::run_suites(suites, alg, verify_seed, suite_opts);
      emit(subdiag::report_to_json(report), verify_out);
      return report.overall ? 0 : 1;
    }

    if (*det) {
      const CMatrix m = subdiag::parse_matrix_arg(det_matrix);
      emit(Json{{"command", "det"},
                {"input", input_block(m)},
                {"delta", subdiag::fk_det(m)}},
           det_out);
      return 0;
    }

    if (*factor) {
      const CMatrix b = subdiag::parse_matrix_arg(factor_matrix);
      const subdiag::TracialSubalgebra alg = factor_alg.resolve(static_cast<int>(b.rows()));
      const CMatrix r = subdiag::positive_factor(alg, b);
      emit(Json{{"command", "factor"},
                {"input", input_block(b)},
                {"algebra", subdiag::describe_algebra(alg)},
                {"factor", subdiag::matrix_to_json(r)},
                {"residual", (r.adjoint() * r - b).norm() / b.norm()},
                {"delta", subdiag::fk_det(b)},
                {"delta_factor", subdiag::fk_det(r)}},
           factor_out);
      return 0;
    }

    if (*innerouter) {
      const CMatrix f = subdiag::parse_matrix_arg(io_matrix);
      const subdiag::TracialSubalgebra alg = io_alg.resolve(static_cast<int>(f.rows()));
      if (!subdiag::is_factorable(f))
        throw subdiag::PreconditionError("matrix determinant is below the factorability floor");
      const subdiag::InnerOuter split = subdiag::inner_outer(alg, f);
      const subdiag::InnerOuter via = subdiag::inner_outer_via_projection(alg, f);
      const subdiag::OuterCheck oc = subdiag::check_outer(alg, split.outer);
      const int n = alg.n();
      emit(Json{{"command", "innerouter"},
                {"input", input_block(f)},
                {"algebra", subdiag::describe_algebra(alg)},
                {"inner", subdiag::matrix_to_json(split.inner)},
                {"outer", subdiag::matrix_to_json(split.outer)},
                {"residual", (split.inner * split.outer - f).norm() / f.norm()},
                {"unitarity",
                 (split.inner.adjoint() * split.inner - CMatrix::Identity(n, n)).norm()},
                {"route_agreement", (split.outer - via.outer).norm() / split.outer.norm()},
                {"outer_certified", oc.outer}},
           io_out);
      return 0;
    }

    if (*szego) {
      const CMatrix h = subdiag::parse_matrix_arg(szego_matrix);
      const subdiag::TracialSubalgebra alg = szego_alg.resolve(static_cast<int>(h.rows()));
      const double delta = subdiag::fk_det(h);
      subdiag::Rng rng(szego_seed);
      Json out{{"command", "szego"},
               {"form", szego_form},
               {"input", input_block(h)},
               {"algebra", subdiag::describe_algebra(alg)},
               {"delta", delta}};
      if (szego_form == "two-sided") {
        const subdiag::TwoSidedResult ts =
            subdiag::szego_lp_two_sided(alg, h, szego_p, szego_q, rng, szego_opts);
        out["p"] = szego_p;
        out["q"] = szego_q;
        out["left"] = Json{{"value", ts.left.value},
                           {"converged", ts.left.converged},
                           {"iterations", ts.left.iterations}};
        out["right"] = Json{{"value", ts.right.value},
                            {"converged", ts.right.converged},
                            {"iterations", ts.right.iterations}};
        out["gap"] = std::max(std::abs(ts.left.value - delta), std::abs(ts.right.value - delta));
      } else {
        const subdiag::SzegoResult res =
            szego_form == "l2" ? subdiag::szego_l2(alg, h, rng, szego_opts)
                               : subdiag::szego_lp(alg, h, szego_p, rng, szego_opts);
        if (szego_form == "lp") out["p"] = szego_p;
        out["value"] = res.value;
        out["gap"] = std::abs(res.value - delta);
        out["converged"] = res.converged;
        out["converged_restarts"] = res.converged_restarts;
        out["iterations"] = res.iterations;
      }
      emit(out, szego_out);
      return 0;
    }

    if (*beurling) {
      subdiag::TracialSubalgebra alg = beurling_alg.resolve();
      subdiag::Subspace k;
      if (!beurling_subspace.empty()) {
        k = subdiag::subspace_from_json(subdiag::json_from_file(beurling_subspace));
        if (k.n != alg.n())
          throw subdiag::InputError("subspace dimension disagrees with the algebra");
      } else {
        subdiag::Rng rng(beurling_seed);
        k = subdiag::random_invariant_subspace(alg, rng, beurling_gens);
      }
      if (!subdiag::is_right_invariant(alg, k))
        throw subdiag::PreconditionError("subspace is not right invariant");
      const subdiag::BeurlingDecomposition bd = subdiag::beurling_decompose(alg, k);
      std::vector<CMatrix> spanning;
      for (const CMatrix& u : bd.isometries)
        for (const CMatrix& basis : alg.basis()) spanning.push_back(u * basis);
      for (const CMatrix& t : bd.tail.basis) spanning.push_back(t);
      Json isoms = Json::array();
      for (const CMatrix& u : bd.isometries) isoms.push_back(subdiag::matrix_to_json(u));
      emit(Json{{"command", "beurling"},
                {"algebra", subdiag::describe_algebra(alg)},
                {"subspace_dim", k.dim()},
                {"isometries", std::move(isoms)},
                {"wandering_dim", bd.wandering.dim()},
                {"tail_dim", bd.tail.dim()},
                {"modulus_drift", bd.modulus_drift},
                {"reconstruction_distance",
                 subdiag::subspace_distance(k, subdiag::make_subspace(alg.n(), spanning))}},
           beurling_out);
      return 0;
    }

    if (*riesz) {
      const CMatrix x = subdiag::parse_matrix_arg(riesz_matrix);
      const subdiag::TracialSubalgebra alg = riesz_alg.resolve(static_cast<int>(x.rows()));
      // --r is redundant given p and q; accept it but insist it agrees.
      if (riesz_r > 0.0 &&
          std::abs(1.0 / riesz_r - (1.0 / riesz_p + 1.0 / riesz_q)) > 1e-12)
        throw subdiag::InputError("--r must satisfy 1/r = 1/p + 1/q");
      const double r_exp = riesz_p * riesz_q / (riesz_p + riesz_q);
      if (!alg.contains(x))
        throw subdiag::PreconditionError("matrix is not in the algebra");
      const subdiag::RieszFactors rf = subdiag::riesz_factor(alg, x, riesz_p, riesz_q);
      const CMatrix lhs = subdiag::mat_pow(subdiag::polar(rf.z).p, riesz_q);
      const CMatrix rhs = subdiag::mat_pow(subdiag::polar(x).p, r_exp);
      emit(Json{{"command", "riesz"},
                {"input", input_block(x)},
                {"algebra", subdiag::describe_algebra(alg)},
                {"p", riesz_p},
                {"q", riesz_q},
                {"r", r_exp},
                {"y", subdiag::matrix_to_json(rf.y)},
                {"z", subdiag::matrix_to_json(rf.z)},
                {"residual", (x - rf.y * rf.z).norm() / x.norm()},
                {"modulus_residual", (lhs - rhs).norm() / rhs.norm()},
                {"z_outer", subdiag::check_outer(alg, rf.z).outer}},
           riesz_out);
      return 0;
    }
  } catch (const subdiag::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const subdiag::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
