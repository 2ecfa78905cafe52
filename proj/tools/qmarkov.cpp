// qmarkov: recurrence, potential and structure analysis of quantum Markov
// operators given as JSON channel documents.

#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "qmarkov/cli.hpp"

using namespace qmarkov;

int main(int argc, char** argv) {
  CLI::App app{"Analyze finite-dimensional quantum Markov operators"};
  app.set_help_flag("-h,--help", "Print this help message and exit");

  cli::AnalysisRequest req;
  std::string format = "text";
  std::string batch_dir;
  bool use_stdin = false;
  double tol = 0.0;
  int power = 0;
  std::string projection, element;

  app.add_option("command", req.command, "analyze | classify | riesz | idempotent | poisson | holevo | classical | crosscheck")
      ->required()
      ->check(CLI::IsMember(cli::commands()));
  app.add_option("input", req.input_path, "Input document (channel or stochastic matrix)");
  auto* tol_opt = app.add_option("--tol", tol, "Uniform numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  auto* proj_opt = app.add_option("--projection", projection, "Projection matrix document (classify)");
  auto* elem_opt = app.add_option("--element", element, "Superharmonic element document (riesz)");
  auto* power_opt = app.add_option("--power", power, "Lift the potential from T^N (riesz)")->check(CLI::PositiveNumber);
  auto* batch_opt = app.add_option("--batch", batch_dir, "Run every *.json file of a directory");
  app.add_flag("--stdio", use_stdin, "Read the document from stdin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kParseFailure;
  }

  req.format = format == "json" ? cli::Format::Json : cli::Format::Text;
  if (*tol_opt) req.tol = tol;
  if (*proj_opt) req.projection_path = projection;
  if (*elem_opt) req.element_path = element;
  if (*power_opt) req.power = power;

  if (*batch_opt) {
    std::vector<cli::AnalysisReport> reports;
    try {
      reports = cli::run_batch(req, batch_dir);
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      return cli::exit_code_for(e.kind());
    }
    int code = cli::kOk;
    if (req.format == cli::Format::Json) {
      nlohmann::json all = nlohmann::json::array();
      for (const auto& r : reports) all.push_back(cli::to_json(r));
      std::cout << all.dump(2) << "\n";
    } else {
      for (const auto& r : reports) std::cout << cli::emit(r, req.format) << "\n";
    }
    for (const auto& r : reports) code = std::max(code, r.exit_code);
    return code;
  }

  if (use_stdin) {
    req.document = std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else if (req.input_path.empty()) {
    std::cerr << "an input document is required (or --stdio / --batch)\n";
    return cli::kParseFailure;
  }

  const cli::AnalysisReport rep = cli::run(req);
  std::cout << cli::emit(rep, req.format);
  if (rep.error && req.format == cli::Format::Text) std::cerr << rep.error->message << "\n";
  return rep.exit_code;
}
