#include "rhcsf/io.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace rhcsf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rhcsf_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("signal CSV round trip is exact") {
  SignalTable t;
  t.inputs.resize(3, 1);
  t.inputs << 0.1, 1.0 / 3.0, 0.987654321012345;
  t.predicted = (Matrix(3, 1) << 0.5, 0.25, M_PI / 10).finished();
  t.measured = (Matrix(3, 1) << 0.4, 0.3, 0.2).finished();
  t.criterion = {10.0, 5.5, 1e-17};
  t.comments = {"config_hash=abc seed=3"};
  const fs::path p = scratch("signal.csv");
  write_signal_csv(p, t, 1);
  const SignalTable back = read_signal_csv(p);
  CHECK(back.inputs == t.inputs);
  CHECK(back.predicted == t.predicted);
  CHECK(back.measured == t.measured);
  CHECK(back.criterion == t.criterion);
  CHECK(back.comments == t.comments);

  std::ifstream in(p);
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  CHECK(first == "# config_hash=abc seed=3");
  CHECK(header == "k,u_1,yhat_1,y_1,J");
}

TEST_CASE("signal CSV with empty optional columns") {
  SignalTable t;
  t.inputs = (Matrix(2, 2) << 0.1, 0.2, 0.3, 0.4).finished();
  const fs::path p = scratch("baseline.csv");
  write_signal_csv(p, t, 1);
  const SignalTable back = read_signal_csv(p);
  CHECK(back.inputs == t.inputs);
  CHECK(back.predicted.size() == 0);
  CHECK(back.criterion.empty());
}

TEST_CASE("dataset CSV and JSON") {
  Dataset d{(Matrix(2, 1) << 0.25, 0.75).finished(), (Matrix(2, 1) << 0.5, 0.6).finished(), Origin::predicted};
  const fs::path p = scratch("dataset.csv");
  write_dataset_csv(p, d);
  const Dataset back = read_dataset_csv(p);
  CHECK(back.inputs == d.inputs);
  CHECK(back.outputs == d.outputs);
  CHECK(back.origin == Origin::predicted);

  const NarxConfig cfg{1, 1, 1, 1.0};
  const nlohmann::json j = dataset_json(cfg, InitialState::constant(cfg, 0.5), d);
  CHECK(j["narx"]["order"] == 1);
  CHECK(j["origin"] == "predicted");
  CHECK(matrix_from_json(j["inputs"]) == d.inputs);
  CHECK(j["initial_state"][1] == 0.5);
}

TEST_CASE("malformed CSV is rejected") {
  const fs::path p = scratch("bad.csv");
  {
    std::ofstream out(p);
    out << "k,u_1\n1,0.5\n2\n";
  }
  CHECK_THROWS_AS((void)read_signal_csv(p), FormatError);
  {
    std::ofstream out(p);
    out << "k,x\n1,0.5\n";
  }
  CHECK_THROWS_AS((void)read_signal_csv(p), FormatError);
  {
    std::ofstream out(p);
    out << "k,u_1\n1,abc\n";
  }
  CHECK_THROWS_AS((void)read_signal_csv(p), FormatError);
  CHECK_THROWS_AS((void)read_signal_csv(scratch("missing.csv")), FormatError);
}

TEST_CASE("config document parsing") {
  const ConfigDocument doc = ConfigDocument::parse(R"(
# comment
top = 1
[experiment]
methods = ["aprbs", "proposed-fixed",]   # trailing comma
length = 300
name = "a # not a comment"
flag = true

[regions]
state_lower = [0, -1.5e-1]
)");
  CHECK(doc.integer("top", 0) == 1);
  CHECK(doc.strings("experiment.methods", {}) == std::vector<std::string>{"aprbs", "proposed-fixed"});
  CHECK(doc.integer("experiment.length", 0) == 300);
  CHECK(doc.string("experiment.name", "") == "a # not a comment");
  CHECK(doc.boolean("experiment.flag", false));
  CHECK(doc.numbers("regions.state_lower", {}) == std::vector<double>{0.0, -0.15});
  CHECK(doc.number("missing.key", 4.5) == 4.5);
  CHECK_THROWS_AS((void)doc.string("experiment.length", ""), ConfigError);

  CHECK_THROWS_AS(ConfigDocument::parse("[open\n"), FormatError);
  CHECK_THROWS_AS(ConfigDocument::parse("novalue\n"), FormatError);
  CHECK_THROWS_AS(ConfigDocument::parse("a = 1\na = 2\n"), FormatError);
  CHECK_THROWS_AS(ConfigDocument::parse("a = \"x\n"), FormatError);
  CHECK_THROWS_AS(ConfigDocument::parse("a = [1, \"x\"]\n"), FormatError);
  CHECK_THROWS_AS((void)ConfigDocument::parse("a = 1.5\n").integer("a", 0), ConfigError);
}
