#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgfock/app/config.hpp"
#include "kgfock/app/golden.hpp"
#include "kgfock/app/report.hpp"
#include "kgfock/app/runner.hpp"

using namespace kgfock;
using namespace kgfock::app;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kgfock-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream(path) << doc.dump(2);
  return path;
}

const json small = {{"lattice", {{"v", 1}, {"kappa", 1}, {"n_max", 2}}}, {"coupling", {{"lambda", 0.1}}}};

}  // namespace

TEST_SUITE("app") {
  TEST_CASE("config parsing and defaults") {
    const ExperimentConfig c = parse_config(json::object());
    CHECK(c.v == make_rational(1));
    CHECK(c.kappa == 4.0);
    CHECK(c.n_max == 3);
    CHECK(c.polynomial.size() == 2);
    const ExperimentConfig e = load_config(std::string(KGFOCK_SOURCE_DIR) + "/configs/example.json");
    CHECK(e.refinement_levels.size() == 3);
    CHECK(e.polynomial.size() == 5);
    CHECK(parse_config(json{{"lattice", {{"v", "3/2"}, {"kappa", 2}}}}).v == make_rational(3, 2));
  }

  TEST_CASE("strict schema") {
    const std::vector<std::string> bad{
        R"({"bogus": 1})",
        R"({"lattice": {"kapa": 2}})",
        R"({"lattice": {"kappa": -1}})",
        R"({"lattice": {"kappa": "4"}})",
        R"({"lattice": {"v": "0/3"}})",
        R"({"lattice": {"v": 1.5}})",
        R"({"lattice": {"n_max": -1}})",
        R"({"lattice": {"refinement_levels": [{"v": 1}]}})",
        R"({"lattice": {"refinement_levels": {"v": 1}}})",
        R"({"potential": {"kind": "square"}})",
        R"({"potential": {"width": 0}})",
        R"({"polynomial": {"coeffs": [[3, 0, 1.0]]}})",
        R"({"polynomial": {"coeffs": [[4, 0]]}})",
        R"({"quantize": {"points": 63}})",
        R"({"override_stability": 1})",
        R"({"probe": {"times": []}})",
        R"({"lattice": {"kappa": 0.5}})",
        R"([])",
    };
    for (const auto& text : bad) {
      INFO(text);
      CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
    }
    const auto dir = scratch("strict");
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
  }

  TEST_CASE("config hash") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const ExperimentConfig a = parse_config(small);
    json moved = small;
    moved["output"] = {{"directory", "elsewhere"}};
    CHECK(config_hash(a) == config_hash(parse_config(moved)));
    json changed = small;
    changed["coupling"]["lambda"] = 0.2;
    CHECK(config_hash(a) != config_hash(parse_config(changed)));
    // Canonicalization fills defaults, so an explicit default hashes identically.
    json explicit_default = small;
    explicit_default["lattice"]["mass"] = 1.0;
    CHECK(config_hash(a) == config_hash(parse_config(explicit_default)));
    CHECK(parse_config(canonical_json(a)).kappa == a.kappa);
    CHECK(config_hash(parse_config(canonical_json(a))) == config_hash(a));
  }

  TEST_CASE("report serialization") {
    CHECK(number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(number(std::nan("")).is_null());
    CHECK(number(1.5) == 1.5);
    CHECK(read_number(json("inf")) == std::numeric_limits<double>::infinity());
    CHECK(std::isnan(read_number(json(nullptr))));
    CHECK_THROWS_AS(read_number(json("x")), ParameterError);
    const CsvTable t{"trace", {"a", "b"}, {{1.0, 0.25}, {std::numeric_limits<double>::infinity(), std::nan("")}}};
    CHECK(csv_text(t) == "a,b\n1,0.25\ninf,nan\n");

    const auto dir = scratch("atomic");
    write_atomic(dir / "x.txt", "hello");
    write_atomic(dir / "x.txt", "again");
    std::ifstream in(dir / "x.txt");
    std::string content((std::istreambuf_iterator<char>(in)), {});
    CHECK(content == "again");
    int files = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir)) ++files;
    CHECK(files == 1);
  }

  TEST_CASE("subcommands") {
    json zero = small;
    zero["potential"] = {{"kind", "zero"}};
    const RunRecord lq = execute("lambda-quant", parse_config(zero));
    CHECK(lq.report["lambda_quant"] == "inf");
    CHECK(lq.quantities.contains("lambda_quant"));
    CHECK(lq.config_hash.size() == 64);

    const RunRecord a = execute("spectrum", parse_config(small));
    const RunRecord b = execute("spectrum", parse_config(small));
    CHECK(a.report.dump() == b.report.dump());
    CHECK(a.report["eigenvalues"].size() == 5);
    CHECK(a.traces.size() == 1);

    json q = small;
    q["potential"] = {{"kind", "gaussian"}, {"amplitude", 0.2}};
    q["quantize"] = {{"points", 16}, {"length", 8.0}};
    const RunRecord qr = execute("quantize", parse_config(q));
    CHECK(qr.report["j_square_residual"].get<double>() < 1e-10);

    json levels = small;
    levels["lattice"]["refinement_levels"] = json::parse(R"([{"v": 1, "kappa": 1}, {"v": 1, "kappa": 2}])");
    levels["coupling"]["lambda"] = 0.0;
    const RunRecord conv = execute("convergence", parse_config(levels));
    CHECK(conv.report["resolvent_gaps"].size() == 1);
    CHECK(conv.traces.size() == 2);
    CHECK_THROWS_AS(execute("convergence", parse_config(small)), ParameterError);
    const RunRecord hvz = execute("hvz", parse_config(levels));
    CHECK(hvz.report["levels"].size() == 2);

    json probe = small;
    probe["probe"] = json::parse(R"({"times": [0, 1, 2]})");
    const RunRecord pr = execute("probe-scattering", parse_config(probe));
    CHECK(pr.report["re"].size() == 3);
    CHECK(pr.report["cauchy_differences"].size() == 2);
    CHECK_THROWS_AS(execute("dance", parse_config(small)), ParameterError);
  }

  TEST_CASE("exit codes and artifacts") {
    const auto dir = scratch("run");
    std::ostringstream out, err;
    CHECK(run_command("validate", std::string(KGFOCK_SOURCE_DIR) + "/configs/example.json", out, err) == kOk);

    json over = small;
    over["coupling"]["lambda"] = 5.0;
    over["output"] = {{"directory", (dir / "over").string()}};
    CHECK(run_command("spectrum", write_json(dir / "over.json", over), out, err) == kStability);
    over["override_stability"] = true;
    CHECK(run_command("spectrum", write_json(dir / "over.json", over), out, err) == kOk);
    CHECK(std::filesystem::exists(dir / "over" / "spectrum.json"));
    CHECK(std::filesystem::exists(dir / "over" / "spectrum-eigenvalues.csv"));
    std::ifstream in(dir / "over" / "spectrum.json");
    const json record = json::parse(in);
    CHECK(record["subcommand"] == "spectrum");
    CHECK(record["config_hash"].get<std::string>().size() == 64);

    json unstable = small;
    unstable["potential"] = {{"kind", "gaussian"}, {"amplitude", 3.0}};
    unstable["quantize"] = {{"points", 16}, {"length", 8.0}};
    CHECK(run_command("quantize", write_json(dir / "unstable.json", unstable), out, err) == kStability);

    json invalid = small;
    invalid["extra"] = true;
    CHECK(run_command("spectrum", write_json(dir / "invalid.json", invalid), out, err) == kValidation);

    json tight = small;
    tight["solver"] = {{"dense_limit", 1}, {"max_restarts", 1}, {"max_basis", 8}, {"block_size", 1}, {"residual_contract", 1e-300}};
    tight["lattice"]["kappa"] = 2;
    CHECK(run_command("spectrum", write_json(dir / "tight.json", tight), out, err) == kSolver);

    CHECK(exit_code_for(std::make_exception_ptr(GoldenMissingError("x"))) == kMissingGolden);
    CHECK(exit_code_for(std::make_exception_ptr(IllConditionedError("x", 0.0))) == kSolver);
    CHECK(exit_code_for(std::make_exception_ptr(ResourceError("x"))) == kValidation);
  }

  TEST_CASE("golden check") {
    const auto dir = scratch("golden");
    std::ostringstream out, err;
    CHECK(golden_check(dir / "missing.json", out, err) == kMissingGolden);
    CHECK(golden_check(write_json(dir / "empty.json", {{"values", json::array()}}), out, err) == kMissingGolden);
    CHECK(golden_check(write_json(dir / "bad.json", json::parse(R"({"values": [{"name": "x"}]})")), out, err) == kValidation);

    json zero = small;
    zero["potential"] = {{"kind", "zero"}};
    json entry = {{"name", "free.lambda_quant"}, {"subcommand", "lambda-quant"}, {"config", zero},
                  {"pointer", "/lambda_quant"}, {"expected", "inf"}, {"abs_tol", 1e-12}};
    json spectral = {{"name", "small.e0"}, {"subcommand", "spectrum"}, {"config", small}, {"pointer", "/e0"}, {"abs_tol", 1e-10}};
    spectral["expected"] = execute("spectrum", parse_config(small)).report["e0"];
    std::ostringstream good;
    CHECK(golden_check(write_json(dir / "good.json", json{{"values", json::array({entry, spectral})}}), good, err) == kOk);
    CHECK(good.str().find("2/2") != std::string::npos);

    spectral["expected"] = spectral["expected"].get<double>() + 1e-6;
    std::ostringstream perturbed;
    CHECK(golden_check(write_json(dir / "perturbed.json", json{{"values", json::array({entry, spectral})}}), perturbed, err) == kCheckFailed);
    const std::string table = perturbed.str();
    const auto line = table.find("small.e0");
    REQUIRE(line != std::string::npos);
    CHECK(table.find("FAIL", line) != std::string::npos);
  }
}
