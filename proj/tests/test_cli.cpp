#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tropgw/cli.hpp"
#include "tropgw/fanio.hpp"
#include "tropgw/gwengine.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace tropgw;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const nlohmann::json& j) {
  std::string path = std::string("/tmp/tropgw_cli_") + name + ".json";
  std::ofstream f(path);
  f << j.dump();
  return path;
}

}  // namespace

TEST_CASE("invariant compute prints the degree-one initial value") {
  auto r = run_cli({"invariant", "compute", "--model", "P2", "--degree", "1",
                    "--conditions", "pt^2"});
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
}

TEST_CASE("invariant compute prints larger plane counts and honours --unlabelled") {
  auto r = run_cli({"invariant", "compute", "--model", "P2", "--degree", "3",
                    "--conditions", "pt^8", "--unlabelled"});
  CHECK(r.code == 0);
  CHECK(r.out == "12\n");
  auto lab = run_cli({"invariant", "compute", "--model", "P2", "--degree", "2",
                      "--conditions", "pt^5"});
  auto unl = run_cli({"invariant", "compute", "--model", "P2", "--degree", "2",
                      "--conditions", "pt^5", "--unlabelled"});
  // degree factorial 2!^3 = 8
  CHECK(rat_from_string(lab.out.substr(0, lab.out.size() - 1)) ==
        Rat(8) * rat_from_string(unl.out.substr(0, unl.out.size() - 1)));
}

TEST_CASE("invariant compute parses descendants and divisor conditions") {
  auto r = run_cli({"invariant", "compute", "--model", "P2", "--degree", "2",
                    "--conditions", "line pt^5", "--unlabelled"});
  CHECK(r.code == 0);
  CHECK(r.out == "2\n");  // divisor equation: 2 times the point count
  auto h = run_cli({"invariant", "compute", "--model", "R1", "--degree", "2",
                    "--conditions", "t1(pt)^2", "--unlabelled"});
  CHECK(h.code == 0);
  CHECK(h.out == "1/2\n");
}

TEST_CASE("invariant compute accepts explicit directions and alt order") {
  auto r = run_cli({"invariant", "compute", "--model", "P1xP1", "--dirs",
                    "1,0;-1,0;0,1;0,-1", "--conditions", "pt^3", "--unlabelled"});
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
  auto alt = run_cli({"invariant", "compute", "--model", "P1xP1", "--dirs",
                      "1,0;-1,0;0,1;0,-1", "--conditions", "pt^3", "--unlabelled",
                      "--order", "alt"});
  CHECK(alt.out == r.out);
}

TEST_CASE("json output carries the value and the canonical key") {
  auto r = run_cli({"--json", "invariant", "compute", "--model", "P2", "--degree", "1",
                    "--conditions", "pt^2", "--ledger"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["value"] == "1");
  CHECK(j.contains("key"));
  CHECK(j["ledger"].size() >= 1);
}

TEST_CASE("parse errors exit with code 2") {
  CHECK(run_cli({"invariant", "compute", "--model", "NoSuch", "--degree", "1",
                 "--conditions", "pt^2"})
            .code == 1);  // model lookup failure is an internal error
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({"invariant", "compute", "--degree", "1"}).code == 2);  // missing conditions
  CHECK(run_cli({"invariant", "compute", "--model", "P2", "--conditions", "pt^2"}).code == 2);
}

TEST_CASE("rejected preconditions exit with code 3 and print the labels") {
  auto r = run_cli({"invariant", "compute", "--model", "P1xP1", "--dirs", "2,0;-2,0",
                    "--conditions", "pt", "--unlabelled"});
  CHECK(r.code == 3);
  CHECK(r.err.find("condition ii") != std::string::npos);
  auto psi = run_cli({"invariant", "compute", "--model", "P2", "--degree", "1",
                      "--conditions", "t1(line) pt^2"});
  CHECK(psi.code == 3);
  CHECK(psi.err.find("condition i") != std::string::npos);
}

TEST_CASE("moduli psi-product degree matches the closed form") {
  auto r = run_cli({"moduli", "psi-product", "-n", "5", "-a", "1,1,0,0,0", "--degree-only"});
  CHECK(r.code == 0);
  CHECK(r.out == "2\n");
}

TEST_CASE("moduli types lists the trivalent trees") {
  auto r = run_cli({"moduli", "types", "-n", "5"});
  CHECK(r.code == 0);
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') lines++;
  CHECK(lines == 15);  // trivalent 5-mark trees
}

TEST_CASE("moduli boundary-weight reports signed types") {
  auto r = run_cli({"moduli", "boundary-weight", "-n", "5", "-a", "0,0,0,0,0", "-p", "12|345"});
  CHECK(r.code == 0);
  CHECK(r.out.find("+") != std::string::npos);
}

TEST_CASE("mark guard refuses oversized moduli queries") {
  auto r = run_cli({"moduli", "types", "-n", "12"});
  CHECK(r.code == 2);
  CHECK(r.err.find("guard") != std::string::npos);
}

TEST_CASE("degree helpers: factorial and delta fan") {
  auto f = run_cli({"degree", "factorial", "--dirs", "1,0x2;0,1x2;-1,-1x2"});
  CHECK(f.code == 0);
  CHECK(f.out == "8\n");
  auto d = run_cli({"degree", "delta", "--dirs", "1,0;0,1;-1,-1"});
  CHECK(d.code == 0);
  WeightedComplex delta = complex_from_json(nlohmann::json::parse(d.out));
  CHECK(delta.dim() == 1);
  CHECK(delta.check_balanced().ok);
}

TEST_CASE("fan subcommands round-trip through the JSON formats") {
  SurfaceModel m = build_surface_model(ModelName::P2);
  std::string line_path = write_temp("line", complex_to_json(m.basis[1]));
  auto chk = run_cli({"fan", "check", "-i", line_path});
  CHECK(chk.code == 0);
  CHECK(chk.out == "balanced\n");

  auto rec = run_cli({"fan", "recession", "-i", line_path});
  CHECK(rec.code == 0);
  WeightedComplex back = complex_from_json(nlohmann::json::parse(rec.out));
  CHECK(back.equals_up_to_refinement(m.basis[1]));

  std::string theta_path = write_temp("theta", complex_to_json(m.theta));
  REQUIRE(m.aux_fn_a.has_value());
  std::string fn_path = write_temp("fn", plfunction_to_json(*m.aux_fn_a));
  auto div = run_cli({"fan", "divisor", "-i", theta_path, "-f", fn_path});
  CHECK(div.code == 0);
  WeightedComplex cut = complex_from_json(nlohmann::json::parse(div.out));
  CHECK(cut.equals_up_to_refinement(m.basis[1]));

  auto isect = run_cli({"fan", "intersect", "-i", line_path, "-b", line_path});
  CHECK(isect.code == 0);
  WeightedComplex pt = complex_from_json(nlohmann::json::parse(isect.out));
  CHECK(pt.dim() == 0);
  CHECK(pt.degree0() == 1);
}

TEST_CASE("verify suites pass and report per check") {
  auto md = run_cli({"verify", "models"});
  CHECK(md.code == 0);
  CHECK(md.out.find("FAIL") == std::string::npos);
  auto fd = run_cli({"verify", "fan-displacement", "--model", "P2", "--seed", "7"});
  CHECK(fd.code == 0);
  CHECK(fd.out.find("FAIL") == std::string::npos);
  auto fg = run_cli({"verify", "forgetful", "--max-n", "5"});
  CHECK(fg.code == 0);
  CHECK(fg.out.find("FAIL") == std::string::npos);
  auto pm = run_cli({"verify", "parmod", "--max-n", "4"});
  CHECK(pm.code == 0);
  CHECK(pm.out.find("FAIL") == std::string::npos);
}
