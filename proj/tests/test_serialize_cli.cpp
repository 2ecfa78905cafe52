#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qmarkov/cli.hpp"
#include "qmarkov/error.hpp"
#include "qmarkov/serialize.hpp"
#include "support.hpp"

using namespace qmarkov;
using qmtest::Rng;

namespace {
const std::string kData = QM_TEST_DATA;

cli::AnalysisReport run_cmd(const std::string& cmd, const std::string& file, cli::Format f = cli::Format::Json) {
  cli::AnalysisRequest req;
  req.command = cmd;
  req.input_path = kData + "/" + file;
  req.format = f;
  return cli::run(req);
}
}  // namespace

TEST_CASE("matrix documents round trip") {
  Rng r(101);
  const Mat m = qmtest::gaussian(3, 3, r);
  CHECK(io::matrix_from_json(io::to_json(m)) == m);
  // "im" may be omitted
  const auto j = io::parse_text(R"({"dim":2,"re":[[1,2],[3,4]]})");
  CHECK(io::matrix_from_json(j)(1, 0) == cplx(3.0));
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_text(R"({"dim":2,"re":[[1,2]]})")), Error);
  CHECK_THROWS_AS(io::parse_text("{\"dim\": "), Error);
}

TEST_CASE("channel documents round trip in every form") {
  Rng r(102);
  std::vector<QuantumChannel> chans = {
      QuantumChannel::from_kraus(qmtest::random_kraus(3, 2, r)),
      QuantumChannel::from_holevo(qmtest::random_holevo(3, 2, r)),
      QuantumChannel::from_stochastic(qmtest::random_stochastic(4, r)),
      QuantumChannel::from_choi(QuantumChannel::from_kraus(qmtest::random_kraus(2, 3, r)).choi()),
  };
  for (const auto& t : chans) {
    const auto j = io::channel_to_json(t);
    CHECK(io::is_channel_document(j));
    const auto back = io::channel_from_json(io::parse_text(j.dump()));
    CHECK((back.super() - t.super()).norm() < 1e-12);
  }
  const auto sp = StochasticMatrix::from_rows(qmtest::random_stochastic(5, r));
  CHECK(io::stochastic_from_json(io::stochastic_to_json(sp)).matrix() == sp.matrix());
}

TEST_CASE("reports round trip through emit and parse") {
  const std::pair<const char*, const char*> cases[] = {
      {"analyze", "ex47.json"},   {"classify", "ex47.json"},  {"riesz", "ex47.json"},
      {"idempotent", "ex74.json"}, {"poisson", "ex92.json"},  {"holevo", "ex92.json"},
      {"classical", "chain.json"}, {"crosscheck", "chain.json"}, {"crosscheck", "ex47.json"},
      {"idempotent", "chain.json"}, {"analyze", "malformed.json"},
  };
  for (const auto& [cmd, file] : cases) {
    const auto rep = run_cmd(cmd, file);
    INFO(cmd << " " << file);
    CHECK(cli::parse_report(cli::emit(rep, cli::Format::Json)) == rep);
    CHECK_FALSE(cli::emit(rep, cli::Format::Text).empty());
  }
}

TEST_CASE("exit codes") {
  CHECK(run_cmd("analyze", "ex47.json").exit_code == cli::kOk);
  CHECK(run_cmd("holevo", "ex92.json").exit_code == cli::kOk);
  CHECK(run_cmd("idempotent", "ex92.json").exit_code == cli::kOk);
  CHECK(run_cmd("analyze", "malformed.json").exit_code == cli::kParseFailure);
  const auto ni = run_cmd("idempotent", "chain.json");
  CHECK(ni.exit_code == cli::kValidationFailure);
  REQUIRE(ni.error.has_value());
  CHECK(ni.error->kind == "NotIdempotent");
  CHECK(run_cmd("analyze", "does_not_exist.json").exit_code == cli::kParseFailure);
  CHECK(cli::exit_code_for(ErrorKind::CrossCheckMismatch) == cli::kToleranceBreakdown);
  CHECK(cli::exit_code_for(ErrorKind::NotPsd) == cli::kValidationFailure);
}

TEST_CASE("projection flag and stdin document") {
  cli::AnalysisRequest req;
  req.command = "classify";
  req.input_path = "-";
  std::ifstream in(kData + "/ex47.json");
  req.document = std::string(std::istreambuf_iterator<char>(in), {});
  req.projection_path = kData + "/q_half.json";
  const auto rep = cli::run(req);
  REQUIRE(rep.exit_code == cli::kOk);
  CHECK(rep.results.dump().find("\"skew_recurrent\":true") != std::string::npos);
}

TEST_CASE("batch mode is ordered and complete") {
  cli::AnalysisRequest req;
  req.command = "analyze";
  const auto reps = cli::run_batch(req, kData + "/batch");
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].input.find("chain.json") != std::string::npos);
  for (const auto& r : reps) CHECK(r.exit_code == cli::kOk);
}
