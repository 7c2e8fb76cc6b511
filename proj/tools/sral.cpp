#include <cstdlib>
#include <iostream>
#include <string>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>

#include "sral/io.hpp"
#include "sral/verify.hpp"

namespace {

using sral::CMatrix;
using sral::Complex;
using json = sral::io::json;

constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;
constexpr int kExitHypothesis = 4;

long long env_budget() {
  if (const char* s = std::getenv("SRAL_BUDGET")) {
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return sral::families::kDefaultBudget;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    sral::io::save_text(out_path, text);
}

void emit_json(const std::string& out_path, const json& j) { emit(out_path, j.dump(2) + "\n"); }

sral::families::BoundedFamily family_allow_empty(const json& j, Eigen::Index fallback_dim) {
  sral::families::BoundedFamily f;
  if (!j.is_object() || !j.contains("members")) throw sral::ParseError("family: members missing");
  if (j["members"].empty()) {
    (void)fallback_dim;
    return f;
  }
  return sral::io::bounded_from_json(j);
}

sral::elem::OperatorValuedCurve curve_from_samples(const sral::io::CurveSamples& c) {
  sral::elem::OperatorValuedCurve out;
  out.alpha = c.alpha;
  out.beta = c.beta;
  double h = (c.beta - c.alpha) / static_cast<double>(c.samples.size());
  std::vector<CMatrix> samples = c.samples;
  out.sample = [samples, a = c.alpha, h](double t) {
    auto k = static_cast<std::size_t>((t - a) / h);
    if (k >= samples.size()) k = samples.size() - 1;
    return samples[k];
  };
  return out;
}

std::string self_path() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return "";
  buf[n] = '\0';
  return std::string(buf);
}

json spectrum_json(const sral::linalg::SpectrumSet& s) {
  std::vector<Complex> ev = s.eigenvalues;
  std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  json arr = json::array();
  for (const Complex& e : ev) arr.push_back(json::array({e.real(), e.imag()}));
  return json{{"eigenvalues", std::move(arr)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brackets, lifts and chains for matrix families and elementary operators"};
  app.require_subcommand(1);

  long long budget = env_budget();
  std::uint64_t seed = 42;
  std::string out_path;
  app.add_option("--budget", budget, "node budget for enumerations");
  app.add_option("-o,--output", out_path, "write the report here instead of stdout");

  auto* cmd_jsr = app.add_subcommand("jsr", "norm bracket for a bounded family");
  std::string jsr_file;
  double jsr_delta = 1e-3;
  cmd_jsr->add_option("family", jsr_file, "family JSON")->required();
  cmd_jsr->add_option("--delta", jsr_delta, "pruning margin");

  auto* cmd_tsr = app.add_subcommand("tsr", "power-sum bracket for a summable family");
  std::string tsr_file, tsr_norm = "operator";
  int tsr_depth = 6;
  cmd_tsr->add_option("family", tsr_file, "family JSON")->required();
  cmd_tsr->add_option("--depth", tsr_depth, "maximum word length");
  cmd_tsr->add_option("--norm", tsr_norm, "operator|frobenius");

  auto* cmd_elem = app.add_subcommand("elem", "elementary-operator reports");
  std::string elem_mode, elem_file;
  int elem_nodes = 0;
  cmd_elem->add_option("mode", elem_mode, "spec|trace|engel|inclusion|quad")->required();
  cmd_elem->add_option("input", elem_file, "operator JSON (inclusion: {u,v}; quad: {a,b} curves)")
      ->required();
  cmd_elem->add_option("--nodes", elem_nodes, "quadrature node count (quad mode)");

  auto* cmd_riesz = app.add_subcommand("riesz", "contour spectral projection");
  std::string riesz_file;
  std::vector<double> riesz_center;
  double riesz_radius = 1.0;
  int riesz_nodes = 16;
  cmd_riesz->add_option("matrix", riesz_file, "matrix JSON")->required();
  cmd_riesz->add_option("--center", riesz_center, "contour center: re [im]")
      ->expected(1, 2)
      ->required();
  cmd_riesz->add_option("--radius", riesz_radius, "contour radius");
  cmd_riesz->add_option("--nodes", riesz_nodes, "initial quadrature nodes");

  auto* cmd_tri = app.add_subcommand("triangularize", "invariant chain for a nil family");
  std::string tri_file;
  cmd_tri->add_option("family", tri_file, "family JSON")->required();

  auto* cmd_decay = app.add_subcommand("decay", "quota-constrained product decay curve");
  std::string decay_k, decay_f;
  double decay_lambda = 0.5;
  int decay_mmax = 16;
  cmd_decay->add_option("kfamily", decay_k, "family JSON for the ideal generators")->required();
  cmd_decay->add_option("ffamily", decay_f, "family JSON for the frame (members may be empty)")
      ->required();
  cmd_decay->add_option("--lambda", decay_lambda, "minimum fraction of ideal factors");
  cmd_decay->add_option("--m-max", decay_mmax, "longest word length");

  auto* cmd_pair = app.add_subcommand("pair", "series reconstruction on a spectral subspace");
  std::string pair_file;
  double pair_p = 1.0, pair_cluster = 0.6;
  int pair_m = 3;
  cmd_pair->add_option("operator", pair_file, "operator JSON with compact flags")->required();
  cmd_pair->add_option("--p", pair_p, "Schatten exponent of the fine norm");
  cmd_pair->add_option("--m", pair_m, "power used for the splitting");
  cmd_pair->add_option("--cluster", pair_cluster,
                       "subspace keeps eigenvalues above this fraction of the largest");

  auto* cmd_verify = app.add_subcommand("verify", "acceptance suites");
  std::string verify_suite = "all";
  cmd_verify->add_option("--suite", verify_suite, "suite name or 'all'");
  cmd_verify->add_option("--seed", seed, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_jsr) {
      sral::families::BoundedFamily f = sral::io::bounded_from_json(sral::io::load_json(jsr_file));
      sral::families::RadiusBracket b = sral::families::jsr_bracket(f, jsr_delta, budget);
      emit_json(out_path, sral::io::bracket_to_json(b));
      return b.certified ? 0 : kExitBudget;
    }

    if (*cmd_tsr) {
      sral::families::SummableFamily f = sral::io::family_from_json(sral::io::load_json(tsr_file));
      sral::families::NormKind norm;
      if (tsr_norm == "operator")
        norm = sral::families::NormKind::Operator;
      else if (tsr_norm == "frobenius")
        norm = sral::families::NormKind::Frobenius;
      else
        throw sral::ParseError("unknown norm: " + tsr_norm);
      sral::families::RadiusBracket b = sral::families::tsr_bracket(f, tsr_depth, norm, budget);
      emit_json(out_path, sral::io::bracket_to_json(b));
      return 0;
    }

    if (*cmd_elem) {
      json j = sral::io::load_json(elem_file);
      if (elem_mode == "spec") {
        emit_json(out_path, spectrum_json(sral::elem::elem_spectrum(sral::io::elem_from_json(j))));
        return 0;
      }
      if (elem_mode == "trace") {
        Complex tr = sral::elem::elem_trace(sral::io::elem_from_json(j));
        emit_json(out_path, json{{"trace", json::array({tr.real(), tr.imag()})}});
        return 0;
      }
      if (elem_mode == "engel") {
        sral::elem::StrongEngelReport rep =
            sral::elem::strong_engel_check(sral::io::elem_from_json(j));
        emit_json(out_path, sral::io::engel_to_json(rep));
        return rep.hypothesis_satisfied ? 0 : kExitHypothesis;
      }
      if (elem_mode == "inclusion") {
        if (!j.contains("u") || !j.contains("v"))
          throw sral::ParseError("inclusion input must be {\"u\": <op>, \"v\": <op>}");
        sral::elem::InclusionReport rep = sral::elem::spectral_inclusion_check(
            sral::io::elem_from_json(j["u"]), sral::io::elem_from_json(j["v"]));
        emit_json(out_path, sral::io::inclusion_to_json(rep));
        return rep.hypothesis_satisfied ? 0 : kExitHypothesis;
      }
      if (elem_mode == "quad") {
        if (!j.contains("a") || !j.contains("b"))
          throw sral::ParseError("quad input must be {\"a\": <curve>, \"b\": <curve>}");
        sral::io::CurveSamples ca = sral::io::curve_from_json(j["a"]);
        sral::io::CurveSamples cb = sral::io::curve_from_json(j["b"]);
        int nodes = elem_nodes > 0 ? elem_nodes : static_cast<int>(ca.samples.size());
        if (nodes != static_cast<int>(ca.samples.size()) ||
            nodes != static_cast<int>(cb.samples.size()))
          throw sral::ParseError("quad: node count must match the sample count");
        sral::elem::ElementaryOperator t =
            sral::elem::quadrature_lift(curve_from_samples(ca), curve_from_samples(cb), nodes);
        emit_json(out_path, sral::io::elem_to_json(t));
        return 0;
      }
      throw sral::ParseError("unknown elem mode: " + elem_mode);
    }

    if (*cmd_riesz) {
      CMatrix a = sral::io::matrix_from_json(sral::io::load_json(riesz_file));
      Complex center(riesz_center[0], riesz_center.size() > 1 ? riesz_center[1] : 0.0);
      CMatrix p = sral::linalg::riesz_projection(
          a, sral::linalg::Contour{center, riesz_radius, riesz_nodes});
      emit_json(out_path, sral::io::matrix_to_json(p));
      return 0;
    }

    if (*cmd_tri) {
      sral::families::BoundedFamily f = sral::io::bounded_from_json(sral::io::load_json(tri_file));
      sral::tri::SubspaceChain chain = sral::tri::triangularize(f.members);
      emit_json(out_path, sral::io::chain_to_json(chain));
      return 0;
    }

    if (*cmd_decay) {
      json jk = sral::io::load_json(decay_k);
      sral::families::BoundedFamily kf = sral::io::bounded_from_json(jk);
      Eigen::Index d = kf.members.front().rows();
      sral::families::BoundedFamily ff = family_allow_empty(sral::io::load_json(decay_f), d);
      std::vector<sral::tri::DecayRow> rows =
          sral::tri::product_decay(kf.members, ff.members, decay_lambda, decay_mmax, budget);
      emit(out_path, sral::io::decay_csv(rows));
      return 0;
    }

    if (*cmd_pair) {
      sral::elem::ElementaryOperator t =
          sral::io::elem_from_json(sral::io::load_json(pair_file));
      auto [small, rest] = sral::elem::semicompact_split(t);
      if (small.terms.empty())
        throw sral::ContractionFails("pair: no terms carry a compact flag");
      CMatrix lift = sral::elem::elem_matrix(t);
      CMatrix e_lift = lift - sral::elem::elem_matrix(small);
      CMatrix e_pow = e_lift, t_pow = lift;
      for (int i = 1; i < pair_m; ++i) {
        e_pow = e_pow * e_lift;
        t_pow = t_pow * lift;
      }
      Eigen::ComplexEigenSolver<CMatrix> es(lift, true);
      if (es.info() != Eigen::Success) throw sral::Error("pair: eigensolver failed");
      double top = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        top = std::max(top, std::abs(es.eigenvalues()(i)));
      std::vector<CMatrix> basis;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) >= pair_cluster * top)
          basis.push_back(sral::linalg::unvec(es.eigenvectors().col(i), t.m, t.n));
      if (basis.empty()) throw sral::ContractionFails("pair: empty spectral subspace");

      std::vector<sral::CVector> vs;
      for (const CMatrix& b : basis) vs.push_back(sral::linalg::vec(b));
      std::vector<sral::CVector> onb = sral::linalg::orthonormalize(vs);
      CMatrix q(lift.rows(), static_cast<Eigen::Index>(onb.size()));
      for (std::size_t i = 0; i < onb.size(); ++i)
        q.col(static_cast<Eigen::Index>(i)) = onb[i];
      CMatrix rmat = q.adjoint() * t_pow * q;
      Eigen::JacobiSVD<CMatrix> svd(rmat);
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      if (!(smin > 0.0)) throw sral::NotSurjectiveOnSubspace("pair: singular on the subspace");
      double r = static_cast<double>(std::min(t.m, t.n));
      double eps =
          std::pow(std::pow(r, 1.0 / pair_p - 0.5) * sral::linalg::op_norm(e_pow), 1.0 / pair_m) *
          (1.0 + 1e-12);
      double tval = std::pow(std::sqrt(r) / smin, 1.0 / pair_m) * (1.0 + 1e-12);
      sral::opair::OrderedPairNorm pr{pair_p, t.m, t.n};
      sral::opair::SpectralSubspaceRun run =
          sral::opair::reconstruct_series(t, pair_m, small, basis, basis.front(), tval, eps, pr);
      emit_json(out_path, sral::io::run_to_json(run));
      return 0;
    }

    if (*cmd_verify) {
      std::string cli = self_path();
      std::vector<sral::verify::Criterion> results;
      if (verify_suite == "all") {
        results = sral::verify::run_all(seed, cli);
      } else {
        results.push_back(sral::verify::run_suite(verify_suite, seed, cli));
      }
      std::string report = sral::verify::render_report(results);
      emit(out_path, report);
      if (!out_path.empty()) std::cout << report;
      for (const sral::verify::Criterion& c : results)
        if (!c.pass) return 1;
      return 0;
    }
  } catch (const sral::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sral::NonSquare& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sral::ShapeMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sral::DimMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sral::LengthMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sral::InvalidP& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sral::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const sral::Error& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    emit(out_path, json{{"error", e.what()}}.dump(2) + "\n");
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
