#pragma once

// JSON documents. Matrices are {"dim": d, "re": [[...]], "im": [[...]]},
// row-major. Channel documents carry {"dim": d, "form": ..., payload}:
//   kraus       "kraus": [matrix, ...]
//   choi        "choi": matrix (dimension d^2)
//   holevo      "states": [matrix, ...], "effects": [matrix, ...]
//   stochastic  "rows": [[...]]
// Stochastic documents are {"n": n, "rows": [[...]]}.
//
// Every parse failure is reported as Error(ParseError); values that parse
// but violate a mathematical invariant raise the module error instead.

#include <json.hpp>

#include "qmarkov/classical.hpp"
#include "qmarkov/classify.hpp"
#include "qmarkov/holevo.hpp"
#include "qmarkov/idempotent.hpp"
#include "qmarkov/poisson.hpp"

namespace qmarkov::io {

using json = nlohmann::json;

json to_json(const Mat& m);
Mat matrix_from_json(const json& j);
json to_json(const RealMat& m);
json to_json(const RealVec& v);
json to_json(const std::vector<bool>& v);

json channel_to_json(const QuantumChannel& t);
QuantumChannel channel_from_json(const json& j, const Tolerances& tol = {});
/// True if the document names a "form".
bool is_channel_document(const json& j);

json stochastic_to_json(const StochasticMatrix& p);
StochasticMatrix stochastic_from_json(const json& j, const Tolerances& tol = {});

json to_json(const RecurrenceSplit& s);
json to_json(const RieszDecomposition& r);
json to_json(const ProjectionVerdict& v);
json to_json(const Thm62Report& r);
json to_json(const HaagResult& h);
json to_json(const IdempotentStructure& s);
json to_json(const ChoiEffrosAlgebra& a);
json to_json(const CondExpReport& r);
json to_json(const WmeReport& r);
json to_json(const PoissonBoundary& b);
json to_json(const CommutativityReport& r);
json to_json(const HolevoCertificate& c);
json to_json(const UniquenessReport& r);
json to_json(const StateClassification& c);
json to_json(const GreenFunction& g);
json to_json(const ClassicalCrossCheck& c);

/// Parse text, mapping syntax errors to Error(ParseError).
json parse_text(const std::string& text);
json read_file(const std::string& path);

}  // namespace qmarkov::io
