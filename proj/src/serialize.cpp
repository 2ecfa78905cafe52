#include "qmarkov/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qmarkov::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + ": missing \"" + key + "\"");
  return *it;
}

int positive_int(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) fail(where + ": expected a positive integer");
  return j.get<int>();
}

// Non-finite values have no JSON form; they are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RealMat real_rows(const json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) fail(where + ": expected " + std::to_string(rows) + " rows");
  RealMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail(where + ": row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) fail(where + ": non-numeric entry at (" + std::to_string(r) + "," + std::to_string(c) + ")");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

std::vector<Mat> matrix_list(const json& j, int d, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a non-empty array of matrices");
  std::vector<Mat> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    Mat m = matrix_from_json(j[k]);
    if (m.rows() != d) fail(where + "[" + std::to_string(k) + "]: dimension " + std::to_string(m.rows()) + ", expected " + std::to_string(d));
    out.push_back(std::move(m));
  }
  return out;
}

json list(const std::vector<Mat>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(to_json(x));
  return a;
}

json complex_value(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

}  // namespace

json to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ir = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(number(m(r, c).real()));
      ir.push_back(number(m(r, c).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Mat matrix_from_json(const json& j) {
  const int d = positive_int(field(j, "dim", "matrix"), "matrix.dim");
  const RealMat re = real_rows(field(j, "re", "matrix"), d, d, "matrix.re");
  RealMat im = RealMat::Zero(d, d);
  if (j.contains("im")) im = real_rows(j["im"], d, d, "matrix.im");
  Mat m(d, d);
  m.real() = re;
  m.imag() = im;
  return m;
}

json to_json(const RealMat& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    a.push_back(std::move(row));
  }
  return a;
}

json to_json(const RealVec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(number(v(k)));
  return a;
}

json to_json(const std::vector<bool>& v) {
  json a = json::array();
  for (bool b : v) a.push_back(b);
  return a;
}

bool is_channel_document(const json& j) { return j.is_object() && j.contains("form"); }

QuantumChannel channel_from_json(const json& j, const Tolerances& tol) {
  const int d = positive_int(field(j, "dim", "channel"), "channel.dim");
  const json& form = field(j, "form", "channel");
  if (!form.is_string()) fail("channel.form: expected a string");
  const std::string f = form.get<std::string>();
  if (f == "kraus") {
    const auto ks = matrix_list(field(j, "kraus", "channel"), d, "channel.kraus");
    return QuantumChannel::from_kraus(ks, tol);
  }
  if (f == "choi") {
    const Mat c = matrix_from_json(field(j, "choi", "channel"));
    if (c.rows() != d * d) fail("channel.choi: dimension must be dim^2");
    return QuantumChannel::from_choi(c, tol);
  }
  if (f == "holevo") {
    HolevoForm h;
    h.states = matrix_list(field(j, "states", "channel"), d, "channel.states");
    h.effects = matrix_list(field(j, "effects", "channel"), d, "channel.effects");
    if (h.states.size() != h.effects.size()) fail("channel: states and effects differ in number");
    return QuantumChannel::from_holevo(h, tol);
  }
  if (f == "stochastic") {
    const RealMat p = real_rows(field(j, "rows", "channel"), d, d, "channel.rows");
    return QuantumChannel::from_stochastic(p, tol);
  }
  fail("channel.form: unknown form \"" + f + "\"");
}

json channel_to_json(const QuantumChannel& t) {
  const int d = t.dim();
  json j{{"dim", d}};
  if (t.holevo_form()) {
    j["form"] = "holevo";
    j["states"] = list(t.holevo_form()->states);
    j["effects"] = list(t.holevo_form()->effects);
  } else if (t.provenance() == Provenance::Stochastic) {
    RealMat p(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) p(i, k) = t.super()(i + i * d, k + k * d).real();
    j["form"] = "stochastic";
    j["rows"] = to_json(p);
  } else if (t.provenance() == Provenance::Kraus) {
    j["form"] = "kraus";
    j["kraus"] = list(t.kraus());
  } else {
    j["form"] = "choi";
    j["choi"] = to_json(t.choi());
  }
  return j;
}

json stochastic_to_json(const StochasticMatrix& p) { return json{{"n", p.n()}, {"rows", to_json(p.matrix())}}; }

StochasticMatrix stochastic_from_json(const json& j, const Tolerances& tol) {
  const int n = positive_int(field(j, "n", "stochastic"), "stochastic.n");
  return StochasticMatrix::from_rows(real_rows(field(j, "rows", "stochastic"), n, n, "stochastic.rows"), tol);
}

json to_json(const RecurrenceSplit& s) {
  return json{{"p_R", to_json(s.p_R.matrix())},
              {"p_Tr", to_json(s.p_Tr.matrix())},
              {"p_R0", to_json(s.p_R0.matrix())},
              {"rank_p_R", s.p_R.rank()},
              {"rank_p_Tr", s.p_Tr.rank()},
              {"subharmonic_margin", number(s.subharmonic_margin)},
              {"superharmonic_margin", number(s.superharmonic_margin)},
              {"sum_residual", number(s.sum_residual)}};
}

json to_json(const RieszDecomposition& r) {
  return json{{"input", to_json(r.input)},
              {"potential", to_json(r.potential)},
              {"harmonic", to_json(r.harmonic)},
              {"charge", to_json(r.charge)},
              {"sum_residual", number(r.sum_residual)},
              {"fixed_residual", number(r.fixed_residual)},
              {"charge_min_eigenvalue", number(r.charge_min_eigenvalue)},
              {"potential_decay", number(r.potential_decay)}};
}

json to_json(const ProjectionVerdict& v) {
  json ev = json::object();
  for (const auto& [k, x] : v.evidence) ev[k] = number(x);
  return json{{"projection", to_json(v.projection.matrix())},
              {"transient", v.transient},
              {"recurrent", v.recurrent},
              {"positive_recurrent", v.positive_recurrent},
              {"skew_recurrent", v.skew_recurrent},
              {"null_recurrent", v.null_recurrent},
              {"evidence", ev}};
}

json to_json(const Thm62Report& r) {
  json cond = json::array(), val = json::array();
  for (int k = 0; k < Thm62Report::kConditions; ++k) {
    cond.push_back(r.condition[k]);
    val.push_back(number(r.value[k]));
  }
  return json{{"conditions", cond}, {"values", val}, {"agree", r.agree}};
}

json to_json(const HaagResult& h) {
  return json{{"exact", number(h.exact)},
              {"empirical", number(h.empirical)},
              {"positive", h.positive},
              {"outside_transient", h.outside_transient},
              {"consistent", h.consistent}};
}

json to_json(const IdempotentStructure& s) {
  const auto& c = s.checks;
  json checks{{"idempotent", number(c.idempotent)},
              {"q_corner", number(c.q_corner)},
              {"q_idempotent", number(c.q_idempotent)},
              {"q_unital", number(c.q_unital)},
              {"q_choi_min", number(c.q_choi_min)},
              {"q_faithful_min", number(c.q_faithful_min)},
              {"s_unital", number(c.s_unital)},
              {"s_support", number(c.s_support)},
              {"s_choi_min", number(c.s_choi_min)},
              {"reconstruction", number(c.reconstruction)},
              {"transient_image", number(c.transient_image)},
              {"compression", number(c.compression)},
              {"range_split", number(c.range_split)},
              {"corner_identity", number(c.corner_identity)}};
  return json{{"p_R", to_json(s.p_R.matrix())},
              {"p_Tr", to_json(s.p_Tr.matrix())},
              {"Q", to_json(s.Q)},
              {"S", s.S ? to_json(*s.S) : json(nullptr)},
              {"q_range_basis", list(s.q_range_basis)},
              {"checks", checks}};
}

json to_json(const ChoiEffrosAlgebra& a) {
  // structure[k][i][j] as [re, im] pairs.
  json tensor = json::array();
  for (const auto& m : a.structure) {
    json slab = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_value(m(i, j)));
      slab.push_back(std::move(row));
    }
    tensor.push_back(std::move(slab));
  }
  json unit = json::array();
  for (Eigen::Index k = 0; k < a.unit.size(); ++k) unit.push_back(complex_value(a.unit(k)));
  return json{{"basis", list(a.basis)},
              {"structure", tensor},
              {"unit", unit},
              {"unit_residual", number(a.unit_residual)},
              {"associativity", number(a.associativity)},
              {"involution", number(a.involution)},
              {"intertwining", number(a.intertwining)},
              {"product_formula", number(a.product_formula)},
              {"cstar_identity", number(a.cstar_identity)}};
}

json to_json(const CondExpReport& r) {
  return json{{"homomorphism", r.homomorphism},
              {"closed", r.closed},
              {"homomorphism_residual", number(r.homomorphism_residual)},
              {"closure_residual", number(r.closure_residual)}};
}

json to_json(const WmeReport& r) {
  return json{{"ergodic_unit_residual", number(r.ergodic_unit_residual)},
              {"fixed_dim", r.fixed_dim},
              {"compression_rank", r.compression_rank},
              {"compression_min_singular", number(r.compression_min_singular)},
              {"unit_ok", r.unit_ok},
              {"injective", r.injective},
              {"transient_potential", r.transient_potential},
              {"passed", r.passed()}};
}

json to_json(const PoissonBoundary& b) {
  json tensor = json::array();
  for (const auto& m : b.structure) {
    json slab = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_value(m(i, j)));
      slab.push_back(std::move(row));
    }
    tensor.push_back(std::move(slab));
  }
  return json{{"p_R", to_json(b.p_R.matrix())},
              {"compressed_basis", list(b.compressed_basis)},
              {"j_table", list(b.j_table)},
              {"structure", tensor},
              {"closure_residual", number(b.closure_residual)},
              {"intertwining_residual", number(b.intertwining_residual)},
              {"fixed_residual", number(b.fixed_residual)},
              {"left_inverse_residual", number(b.left_inverse_residual)},
              {"split_residual", number(b.split_residual)}};
}

json to_json(const CommutativityReport& r) {
  return json{{"compressed_residual", number(r.compressed_residual)},
              {"uncompressed_residual", number(r.uncompressed_residual)},
              {"compressed_dim", r.compressed_dim},
              {"commutative", r.commutative}};
}

json to_json(const HolevoCertificate& c) {
  json ps = json::array();
  for (const auto& p : c.minimal_projections) ps.push_back(to_json(p.matrix()));
  return json{{"states", list(c.form.states)},
              {"effects", list(c.form.effects)},
              {"minimal_projections", ps},
              {"biorthogonality", to_json(c.biorthogonality)},
              {"states_independent", c.states_independent},
              {"effects_independent", c.effects_independent},
              {"states_gram_min", number(c.states_gram_min)},
              {"effects_gram_min", number(c.effects_gram_min)},
              {"reconstruction_residual", number(c.reconstruction_residual)}};
}

json to_json(const UniquenessReport& r) {
  json a = json::array();
  for (const auto& x : r.assertions)
    a.push_back(json{{"name", x.name}, {"passed", x.passed}, {"residual", number(x.residual)}, {"witness", x.witness}});
  return json{{"assertions", a}, {"passed", r.passed()}};
}

json to_json(const StateClassification& c) {
  json kinds = json::array();
  for (auto k : c.kind) kinds.push_back(std::string(to_string(k)));
  json stat = json::array();
  for (const auto& v : c.stationary) stat.push_back(v.size() ? to_json(v) : json(nullptr));
  return json{{"kind", kinds}, {"classes", c.classes}, {"closed", to_json(c.closed)}, {"stationary", stat}};
}

json to_json(const GreenFunction& g) {
  json v = json::array();
  for (Eigen::Index k = 0; k < g.value.size(); ++k)
    v.push_back(g.finite[static_cast<std::size_t>(k)] ? number(g.value(k)) : json("inf"));
  return json{{"value", v}, {"finite", to_json(g.finite)}};
}

json to_json(const ClassicalCrossCheck& c) {
  return json{{"classification", to_json(c.classification)},
              {"spectral_recurrent", to_json(c.spectral_recurrent)},
              {"p_R_residual", number(c.p_R_residual)},
              {"p_Tr_residual", number(c.p_Tr_residual)},
              {"diagonal_residual", number(c.diagonal_residual)},
              {"witness", to_json(c.witness)},
              {"witness_green", to_json(c.witness_green)}};
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace qmarkov::io
