#include "qmarkov/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

namespace qmarkov::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  if (kind == ErrorKind::ParseError) return kParseFailure;
  if (is_breakdown(kind)) return kToleranceBreakdown;
  return kValidationFailure;
}

namespace {

struct Context {
  const AnalysisRequest& req;
  Tolerances tol;
  AnalysisReport& rep;

  void residual(const std::string& name, double v) {
    if (std::isfinite(v)) rep.residuals[name] = v;
    else rep.warnings.push_back("residual " + name + " is not finite");
  }
};

Mat read_matrix_arg(const std::string& path) { return io::matrix_from_json(io::read_file(path)); }

json peripheral_json(const ErgodicAnalysis& an) {
  json a = json::array();
  for (const auto& c : an.peripheral())
    a.push_back(json{{"eigenvalue", {c.eigenvalue.real(), c.eigenvalue.imag()}}, {"multiplicity", c.multiplicity}});
  return a;
}

void structural_identities(Context& cx, const ErgodicAnalysis& an) {
  const auto& s = an.split();
  const int d = an.dim();
  cx.residual("p_R + p_Tr - 1", s.sum_residual);
  cx.residual("min eig(T(p_R) - p_R)", s.subharmonic_margin);
  cx.residual("min eig(p_Tr - T(p_Tr))", s.superharmonic_margin);
  const Mat charge = hermitian_part(s.p_Tr.matrix() - an.apply(s.p_Tr.matrix()));
  const Mat y = potential_sum(an, charge);
  cx.residual("potential(charge(p_Tr)) - p_Tr", (y - s.p_Tr.matrix()).norm());
  cx.residual("P(p_R) - 1", (an.apply_ergodic(s.p_R.matrix()) - identity(d)).norm());
}

json verdict_with_thm62(const ErgodicAnalysis& an, const Projection& p, const std::string& name) {
  const Thm62Report r = thm62_crosscheck(an, p);
  if (!r.agree) {
    throw Error(ErrorKind::CrossCheckMismatch, "transience conditions disagree for " + name);
  }
  return json{{"name", name}, {"verdict", io::to_json(classify_projection(an, p))}, {"transience", io::to_json(r)}};
}

json holevo_section(Context& cx, const QuantumChannel& t, bool idempotent) {
  json h = json::object();
  if (t.holevo_form()) {
    const CommutativityReport c = fixed_commutativity_check(t, cx.tol);
    cx.residual("compressed fixed algebra commutators", c.compressed_residual);
    h["commutativity"] = io::to_json(c);
  }
  if (idempotent) {
    try {
      const HolevoCertificate cert = holevo_from_idempotent(t, cx.tol);
      cx.residual("Holevo reconstruction", cert.reconstruction_residual);
      const UniquenessReport u = verify_uniqueness(cert, cx.tol);
      h["certificate"] = io::to_json(cert);
      h["uniqueness"] = io::to_json(u);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RangeNotCommutative) throw;
      h["certificate"] = nullptr;
      h["note"] = e.what();
    }
  }
  return h;
}

void cmd_analyze(Context& cx, const json& doc) {
  const QuantumChannel t = io::channel_from_json(doc, cx.tol);
  const ErgodicAnalysis an(t, cx.tol);
  auto& out = cx.rep.results;
  out["dim"] = t.dim();
  out["provenance"] = std::string(to_string(t.provenance()));
  cx.residual("T(1) - 1", t.unital_residual());
  cx.residual("choi min eigenvalue", t.choi_min_eigenvalue());
  out["split"] = io::to_json(an.split());
  out["peripheral"] = peripheral_json(an);
  structural_identities(cx, an);

  json cls = json::array();
  cls.push_back(verdict_with_thm62(an, an.split().p_R, "p_R"));
  cls.push_back(verdict_with_thm62(an, an.split().p_Tr, "p_Tr"));
  out["classification"] = cls;

  const WmeReport w = verify_wme(an);
  out["wme"] = io::to_json(w);
  if (!w.passed()) throw Error(ErrorKind::InvariantViolation, "weak* mean ergodicity checks failed");

  const bool idem = is_idempotent(t, cx.tol);
  out["idempotent"] = idem;
  if (idem) {
    const IdempotentStructure st = decompose(t, cx.tol);
    cx.residual("decomposition reconstruction", st.checks.reconstruction);
    out["decomposition"] = io::to_json(st);
    out["conditional_expectation"] = is_conditional_expectation(t, cx.tol);
    const ChoiEffrosAlgebra ce = choi_effros(t, cx.tol);
    cx.residual("Choi-Effros associativity", ce.associativity);
    out["choi_effros"] = io::to_json(ce);
  }
  const PoissonBoundary pb = poisson_boundary(an);
  cx.residual("Poisson intertwining", pb.intertwining_residual);
  out["poisson"] = io::to_json(pb);
  if (t.holevo_form() || idem) out["holevo"] = holevo_section(cx, t, idem);
  const PptAdvisory ppt = ppt_advisory(t, cx.tol);
  out["ppt_advisory"] = json{{"ppt", ppt.ppt}, {"min_eigenvalue", ppt.min_eigenvalue}, {"heuristic", true}};
  for (const auto& w2 : an.warnings()) cx.rep.warnings.push_back(w2);
}

void cmd_classify(Context& cx, const json& doc) {
  const QuantumChannel t = io::channel_from_json(doc, cx.tol);
  const ErgodicAnalysis an(t, cx.tol);
  auto& out = cx.rep.results;
  out["split"] = io::to_json(an.split());
  json v = json::array();
  if (cx.req.projection_path) {
    const Projection p = Projection::from_matrix(read_matrix_arg(*cx.req.projection_path), cx.tol);
    if (p.dim() != t.dim()) throw Error(ErrorKind::DimensionMismatch, "projection and channel differ in dimension");
    v.push_back(verdict_with_thm62(an, p, "projection"));
  } else {
    v.push_back(verdict_with_thm62(an, an.split().p_R, "p_R"));
    v.push_back(verdict_with_thm62(an, an.split().p_Tr, "p_Tr"));
  }
  out["verdicts"] = v;
  for (const auto& w : an.warnings()) cx.rep.warnings.push_back(w);
}

void cmd_riesz(Context& cx, const json& doc) {
  const QuantumChannel t = io::channel_from_json(doc, cx.tol);
  const ErgodicAnalysis an(t, cx.tol);
  const Mat a = cx.req.element_path ? read_matrix_arg(*cx.req.element_path)
                                    : Mat(identity(t.dim()) + an.split().p_Tr.matrix());
  const RieszDecomposition r = riesz_decompose(an, a);
  const RieszDecomposition rc = riesz_decompose(an, a, ErgodicMethod::Cesaro);
  auto& out = cx.rep.results;
  out["decomposition"] = io::to_json(r);
  cx.residual("a - y - h", r.sum_residual);
  cx.residual("T(h) - h", r.fixed_residual);
  cx.residual("charge min eigenvalue", r.charge_min_eigenvalue);
  const double agree = std::max((r.potential - rc.potential).norm(), (r.harmonic - rc.harmonic).norm());
  cx.residual("spectral vs Cesaro", agree);
  if (agree > 100.0 * cx.tol.residual) {
    throw Error(ErrorKind::CrossCheckMismatch, "Riesz decompositions disagree by " + std::to_string(agree));
  }
  if (cx.req.power) {
    const int n = *cx.req.power;
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "--power must be positive");
    const QuantumChannel tn = power(t, n);
    const RieszDecomposition rn = riesz_decompose(tn, a, cx.tol);
    const Mat lifted = power_potential_lift(t, n, rn.potential, cx.tol);
    out["power"] = json{{"n", n},
                        {"potential_for_power", io::to_json(rn.potential)},
                        {"lifted", io::to_json(lifted)},
                        {"lifted_is_potential", is_potential(an, lifted)}};
  }
}

void cmd_idempotent(Context& cx, const json& doc) {
  const QuantumChannel t = io::channel_from_json(doc, cx.tol);
  const IdempotentStructure st = decompose(t, cx.tol);
  auto& out = cx.rep.results;
  out["decomposition"] = io::to_json(st);
  cx.residual("||P o P - P||", st.checks.idempotent);
  cx.residual("reconstruction", st.checks.reconstruction);
  const CondExpReport ce = conditional_expectation_report(t, cx.tol);
  out["conditional_expectation"] = io::to_json(ce);
  out["is_conditional_expectation"] = is_conditional_expectation(t, cx.tol);
  const ChoiEffrosAlgebra alg = choi_effros(t, cx.tol);
  out["choi_effros"] = io::to_json(alg);
  cx.residual("Choi-Effros associativity", alg.associativity);
  cx.residual("Choi-Effros involution", alg.involution);
}

void cmd_poisson(Context& cx, const json& doc) {
  const QuantumChannel t = io::channel_from_json(doc, cx.tol);
  const ErgodicAnalysis an(t, cx.tol);
  const WmeReport w = verify_wme(an);
  auto& out = cx.rep.results;
  out["wme"] = io::to_json(w);
  cx.residual("P(p_R) - 1", w.ergodic_unit_residual);
  if (!w.passed()) throw Error(ErrorKind::InvariantViolation, "weak* mean ergodicity checks failed");
  const PoissonBoundary pb = poisson_boundary(an);
  out["boundary"] = io::to_json(pb);
  cx.residual("closure", pb.closure_residual);
  cx.residual("intertwining", pb.intertwining_residual);
}

void cmd_holevo(Context& cx, const json& doc) {
  const QuantumChannel t = io::channel_from_json(doc, cx.tol);
  const bool idem = is_idempotent(t, cx.tol);
  if (!t.holevo_form() && !idem) {
    throw Error(ErrorKind::NotHolevoProvenance, "channel is neither given in Holevo form nor idempotent");
  }
  cx.rep.results = holevo_section(cx, t, idem);
  cx.rep.results["idempotent"] = idem;
  const PptAdvisory ppt = ppt_advisory(t, cx.tol);
  cx.rep.results["ppt_advisory"] = json{{"ppt", ppt.ppt}, {"min_eigenvalue", ppt.min_eigenvalue}, {"heuristic", true}};
}

StochasticMatrix stochastic_doc(const json& doc, const Tolerances& tol) {
  if (io::is_channel_document(doc)) {
    if (!doc["form"].is_string() || doc["form"].get<std::string>() != "stochastic") {
      throw Error(ErrorKind::ParseError, "expected a stochastic document");
    }
    json s{{"n", doc.value("dim", json(nullptr))}, {"rows", doc.value("rows", json(nullptr))}};
    return io::stochastic_from_json(s, tol);
  }
  return io::stochastic_from_json(doc, tol);
}

void cmd_classical(Context& cx, const json& doc) {
  const StochasticMatrix p = stochastic_doc(doc, cx.tol);
  const StateClassification c = classify_states(p, cx.tol);
  auto& out = cx.rep.results;
  out["classification"] = io::to_json(c);
  json g = json::array();
  for (int j = 0; j < p.n(); ++j) {
    const GreenFunction gj = green_function(p, RealVec::Unit(p.n(), j), cx.tol);
    g.push_back(json{{"state", j}, {"return_visits_finite", static_cast<bool>(gj.finite[j])}, {"green", io::to_json(gj)}});
  }
  out["green"] = g;
}

void cmd_crosscheck(Context& cx, const json& doc) {
  auto& out = cx.rep.results;
  if (io::is_channel_document(doc) && doc["form"] != "stochastic") {
    const QuantumChannel t = io::channel_from_json(doc, cx.tol);
    const ErgodicProjection s = ergodic_projection(t, cx.tol, ErgodicMethod::Spectral);
    const ErgodicProjection c = ergodic_projection(t, cx.tol, ErgodicMethod::Cesaro);
    const double diff = (s.super - c.super).norm();
    cx.residual("spectral vs Cesaro ergodic projection", diff);
    out["cesaro_terms"] = c.cesaro_terms;
    out["cesaro_powers"] = c.squarings;
    if (diff > 100.0 * cx.tol.residual) {
      throw Error(ErrorKind::CrossCheckMismatch, "ergodic projections differ by " + std::to_string(diff));
    }
    return;
  }
  const StochasticMatrix p = stochastic_doc(doc, cx.tol);
  const ClassicalCrossCheck c = crosscheck_quantum(p, cx.tol);
  out["crosscheck"] = io::to_json(c);
  cx.residual("p_R graph vs spectral", c.p_R_residual);
  cx.residual("p_Tr graph vs spectral", c.p_Tr_residual);
  cx.residual("diagonal action", c.diagonal_residual);
}

}  // namespace

AnalysisReport run(const AnalysisRequest& req) {
  AnalysisReport rep;
  rep.command = req.command;
  rep.input = req.document ? "<stdin>" : req.input_path;
  try {
    Context cx{req, req.tol ? Tolerances::uniform(*req.tol) : Tolerances{}, rep};
    const auto& cmds = commands();
    if (std::find(cmds.begin(), cmds.end(), req.command) == cmds.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown command \"" + req.command + "\"");
    }
    const json doc = req.document ? io::parse_text(*req.document) : io::read_file(req.input_path);
    if (req.command == "analyze") cmd_analyze(cx, doc);
    else if (req.command == "classify") cmd_classify(cx, doc);
    else if (req.command == "riesz") cmd_riesz(cx, doc);
    else if (req.command == "idempotent") cmd_idempotent(cx, doc);
    else if (req.command == "poisson") cmd_poisson(cx, doc);
    else if (req.command == "holevo") cmd_holevo(cx, doc);
    else if (req.command == "classical") cmd_classical(cx, doc);
    else cmd_crosscheck(cx, doc);
  } catch (const Error& e) {
    rep.exit_code = exit_code_for(e.kind());
    rep.error = ReportError{std::string(to_string(e.kind())), e.what()};
  } catch (const nlohmann::json::exception& e) {
    rep.exit_code = kParseFailure;
    rep.error = ReportError{"ParseError", e.what()};
  } catch (const std::exception& e) {
    rep.exit_code = kToleranceBreakdown;
    rep.error = ReportError{"InternalError", e.what()};
  }
  return rep;
}

std::vector<AnalysisReport> run_batch(const AnalysisRequest& request, const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  if (ec) throw Error(ErrorKind::InvalidArgument, "cannot list " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<AnalysisReport> out(files.size());
  const long n = static_cast<long>(files.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    AnalysisRequest r = request;
    r.document.reset();
    r.input_path = files[k];
    out[k] = run(r);
  }
  return out;
}

json to_json(const AnalysisReport& r) {
  json err = r.error ? json{{"kind", r.error->kind}, {"message", r.error->message}} : json(nullptr);
  json res = json::object();
  for (const auto& [k, v] : r.residuals) res[k] = v;
  return json{{"command", r.command},
              {"input", r.input},
              {"exit_code", r.exit_code},
              {"error", err},
              {"results", r.results},
              {"residuals", res},
              {"warnings", r.warnings}};
}

AnalysisReport report_from_json(const json& j) {
  auto bad = [](const std::string& what) { return Error(ErrorKind::ParseError, "report: " + what); };
  if (!j.is_object()) throw bad("expected an object");
  for (const char* key : {"command", "input", "exit_code", "error", "results", "residuals", "warnings"})
    if (!j.contains(key)) throw bad(std::string("missing \"") + key + "\"");
  AnalysisReport r;
  if (!j["command"].is_string() || !j["input"].is_string() || !j["exit_code"].is_number_integer())
    throw bad("command, input and exit_code have the wrong type");
  r.command = j["command"].get<std::string>();
  r.input = j["input"].get<std::string>();
  r.exit_code = j["exit_code"].get<int>();
  if (!j["error"].is_null()) {
    const json& e = j["error"];
    if (!e.is_object() || !e.contains("kind") || !e.contains("message") || !e["kind"].is_string() ||
        !e["message"].is_string())
      throw bad("malformed error");
    r.error = ReportError{e["kind"].get<std::string>(), e["message"].get<std::string>()};
  }
  r.results = j["results"];
  if (!j["residuals"].is_object()) throw bad("residuals must be an object");
  for (const auto& [k, v] : j["residuals"].items()) {
    if (!v.is_number()) throw bad("residual " + k + " is not a number");
    r.residuals[k] = v.get<double>();
  }
  if (!j["warnings"].is_array()) throw bad("warnings must be an array");
  for (const auto& w : j["warnings"]) {
    if (!w.is_string()) throw bad("warnings must be strings");
    r.warnings.push_back(w.get<std::string>());
  }
  return r;
}

namespace {

bool is_matrix(const json& j) { return j.is_object() && j.size() == 3 && j.contains("dim") && j.contains("re") && j.contains("im"); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void render_matrix(std::ostream& os, const json& m, const std::string& indent) {
  const auto& re = m["re"];
  const auto& im = m["im"];
  for (std::size_t r = 0; r < re.size(); ++r) {
    os << indent << "[";
    for (std::size_t c = 0; c < re[r].size(); ++c) {
      const double a = re[r][c].is_number() ? re[r][c].get<double>() : NAN;
      const double b = im[r][c].is_number() ? im[r][c].get<double>() : NAN;
      os << (c ? "  " : "") << fmt(std::abs(a) < 1e-12 ? 0.0 : a);
      if (std::abs(b) >= 1e-12) os << (b < 0 ? "-" : "+") << fmt(std::abs(b)) << "i";
    }
    os << "]\n";
  }
}

void render(std::ostream& os, const json& j, const std::string& path) {
  if (is_matrix(j)) {
    os << path << ":\n";
    render_matrix(os, j, "    ");
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render(os, v, path.empty() ? k : path + "." + k);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || is_matrix(j[0]))) {
    for (std::size_t k = 0; k < j.size(); ++k) render(os, j[k], path + "[" + std::to_string(k) + "]");
  } else {
    os << path << ": " << j.dump() << "\n";
  }
}

}  // namespace

std::string emit(const AnalysisReport& r, Format f) {
  if (f == Format::Json) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  os << "command: " << r.command << "\n";
  os << "input: " << r.input << "\n";
  if (r.error) os << "status: " << r.error->kind << " (exit " << r.exit_code << ")\n  " << r.error->message << "\n";
  else os << "status: ok\n";
  if (!r.residuals.empty()) {
    os << "residuals:\n";
    for (const auto& [k, v] : r.residuals) os << "  " << k << " = " << fmt(v) << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  render(os, r.results, "");
  return os.str();
}

AnalysisReport parse_report(const std::string& text) { return report_from_json(io::parse_text(text)); }

}  // namespace qmarkov::cli
