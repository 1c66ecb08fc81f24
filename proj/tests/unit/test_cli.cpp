#include <magbill/errors.hpp>
#include <magbill/io.hpp>
#include <magbill_cli/cli.hpp>
#include <magbill_cli/output.hpp>
#include <magbill_cli/svg.hpp>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace magbill;
using namespace magbill::cli;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& tag) : root(fs::temp_directory_path() / ("magbill_cli_test_" + tag)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string config(const std::string& name, const std::string& body) const {
    const fs::path p = root / name;
    std::ofstream(p) << body;
    return p.string();
  }
  std::string dir(const std::string& name) const { return (root / name).string(); }
};

pt::ptree parse_svg(const std::string& text) {
  std::istringstream is(text);
  pt::ptree tree;
  pt::read_xml(is, tree);
  return tree;
}

int count_children(const pt::ptree& node, const std::string& name) {
  int n = 0;
  for (const auto& child : node)
    if (child.first == name) ++n;
  return n;
}

const char* kEllipse = R"({"curve":{"type":"ellipse","a":2,"b":1},"beta":5,"initial":{"u":0.3,"theta":1.0}})";
const char* kCircle = R"({"curve":{"type":"circle","radius":1},"beta":4})";

}  // namespace

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorCode::InvalidConfig) == kExitValidation);
  CHECK(exit_code_for(ErrorCode::NotClosed) == kExitValidation);
  CHECK(exit_code_for(ErrorCode::NoSolution) == kExitValidation);
  CHECK(exit_code_for(ErrorCode::NoExitFound) == kExitNumeric);
  CHECK(exit_code_for(ErrorCode::ChordSolveFailure) == kExitNumeric);
}

TEST_CASE("simulate is deterministic and writes a sidecar") {
  Workspace ws("determinism");
  const std::string cfg = ws.config("ellipse.json", kEllipse);
  const Run a = invoke({"simulate", "--config", cfg, "--out", ws.dir("a"), "--steps", "50"});
  const Run b = invoke({"simulate", "--config", cfg, "--out", ws.dir("b"), "--steps", "50"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const std::string csv = slurp(fs::path(ws.dir("a")) / "simulate.csv");
  CHECK(csv == slurp(fs::path(ws.dir("b")) / "simulate.csv"));
  CHECK(csv.rfind("step,u,theta,x,y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);

  const json meta_a = json::parse(slurp(fs::path(ws.dir("a")) / "simulate.meta.json"));
  const json meta_b = json::parse(slurp(fs::path(ws.dir("b")) / "simulate.meta.json"));
  CHECK(meta_a.at("config_hash") == meta_b.at("config_hash"));
  CHECK(meta_a.at("config_hash").get<std::string>().size() == 64);
  CHECK(meta_a.at("version") == version());
  CHECK(meta_a.at("data_file") == "simulate.csv");
  CHECK(meta_a.contains("tolerances"));

  const Run c = invoke({"simulate", "--config", cfg, "--out", ws.dir("c"), "--steps", "51"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(slurp(fs::path(ws.dir("c")) / "simulate.meta.json")).at("config_hash") != meta_a.at("config_hash"));
}

TEST_CASE("center mode output") {
  Workspace ws("center");
  const std::string cfg = ws.config("circle.json", kCircle);
  REQUIRE(invoke({"simulate", "--config", cfg, "--out", ws.dir("o"), "--mode", "center", "--steps", "20"}).code == 0);
  std::istringstream csv(slurp(fs::path(ws.dir("o")) / "simulate.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "step,cx,cy");
  double r0 = -1;
  while (std::getline(csv, line)) {
    double step, cx, cy;
    char c1, c2;
    std::istringstream row(line);
    row >> step >> c1 >> cx >> c2 >> cy;
    const double rad = std::hypot(cx, cy);
    if (r0 < 0) r0 = rad;
    CHECK(std::abs(rad - r0) < 1e-10);
  }
}

TEST_CASE("weak field is rejected with the strong-field message") {
  Workspace ws("weak");
  const std::string cfg = ws.config("weak.json", R"({"curve":{"type":"ellipse","a":2,"b":1},"beta":3})");
  for (const char* sub : {"simulate", "portrait", "offset", "integrability", "gutkin-check"}) {
    const Run r = invoke({sub, "--config", cfg, "--out", ws.dir("o")});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("strong-field") != std::string::npos);
    CHECK(r.err.find("beta must exceed 2*max|k| = 4") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(fs::path(ws.dir("o")) / "simulate.csv"));
}

TEST_CASE("input errors exit with code 2") {
  Workspace ws("errors");
  CHECK(invoke({"simulate"}).code == kExitValidation);
  CHECK(invoke({"simulate", "--config", ws.dir("missing.json")}).code == kExitValidation);
  CHECK(invoke({"simulate", "--config", ws.config("bad.json", "{not json")}).code == kExitValidation);
  CHECK(invoke({"simulate", "--config", ws.config("c.json", R"({"curve":{"type":"blob"},"beta":4})")}).code == kExitValidation);
  CHECK(invoke({"simulate", "--config", ws.config("c2.json", kCircle), "--format", "xml", "--out", ws.dir("o")}).code ==
        kExitValidation);
  CHECK(invoke({"gutkin-construct", "--n", "3", "--out", ws.dir("o")}).code == kExitValidation);
  CHECK(invoke({"frobnicate"}).code == kExitValidation);
  CHECK(invoke({"--help"}).code == kExitOk);
  const Run closed = invoke({"offset", "--config", ws.config("nc.json", R"({"curve":{"type":"fourier_rho","c0":1,"cos":[0.3],"sin":[]},"beta":10})")});
  CHECK(closed.code == kExitValidation);
  CHECK(closed.err.find("NotClosed") != std::string::npos);
}

TEST_CASE("svg export") {
  SUBCASE("one closed polyline") {
    SvgScene scene;
    std::vector<Vec2> pts;
    for (int i = 0; i < 64; ++i) pts.push_back(unit(kTwoPi * i / 64));
    scene.paths.push_back({pts, true});
    const pt::ptree tree = parse_svg(export_svg(scene));
    const pt::ptree& svg = tree.get_child("svg");
    CHECK(count_children(svg, "path") == 1);
    const std::string d = svg.get_child("path").get<std::string>("<xmlattr>.d");
    CHECK(d.back() == 'Z');
    CHECK(svg.get<std::string>("<xmlattr>.xmlns") == "http://www.w3.org/2000/svg");
  }
  SUBCASE("ten orbits give ten marker groups") {
    SvgScene scene;
    for (int k = 0; k < 10; ++k) scene.markers.push_back({{Vec2{double(k), 0.0}, Vec2{double(k), 1.0}}, palette_colour(k)});
    const pt::ptree tree = parse_svg(export_svg(scene));
    const pt::ptree& svg = tree.get_child("svg");
    CHECK(count_children(svg, "g") == 10);
    std::set<std::string> ids;
    for (const auto& child : svg)
      if (child.first == "g") ids.insert(child.second.get<std::string>("<xmlattr>.id"));
    CHECK(ids.size() == 10);
  }
  SUBCASE("empty input") {
    try {
      export_svg({});
      FAIL("expected EmptyPlot");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyPlot);
    }
  }
}

TEST_CASE("every subcommand produces parseable output") {
  Workspace ws("all");
  const std::string ell = ws.config("ellipse.json", kEllipse);
  const std::string circ = ws.config("circle.json", kCircle);
  const std::string cubic = ws.config(
      "cubic.json",
      R"({"curve":{"type":"ellipse","a":2,"b":1},"beta":5,"polynomial":{"terms":[{"i":3,"j":0,"c":1},{"i":1,"j":1,"c":-2}]}})");
  const std::string expf = ws.config("exp.json", R"({"curve":{"type":"ellipse","a":2,"b":1},"beta":5,"function":"exp"})");

  REQUIRE(invoke({"portrait", "--config", ell, "--out", ws.dir("p"), "--grid", "3", "--steps", "30", "--format", "svg"}).code == 0);
  const pt::ptree portrait = parse_svg(slurp(fs::path(ws.dir("p")) / "portrait.svg"));
  CHECK(count_children(portrait.get_child("svg"), "g") == 9);

  const Run cp = invoke({"portrait", "--config", circ, "--out", ws.dir("pc"), "--grid", "3", "--steps", "100"});
  REQUIRE(cp.code == 0);
  CHECK(json::parse(cp.out.substr(cp.out.find('{'))).at("max_radial_spread").get<double>() < 1e-8);

  REQUIRE(invoke({"offset", "--config", ell, "--out", ws.dir("o"), "--grid", "16", "--format", "json"}).code == 0);
  CHECK(json::parse(slurp(fs::path(ws.dir("o")) / "offset.json")).at("samples").size() == 16);

  REQUIRE(invoke({"integrability", "--config", ell, "--out", ws.dir("i"), "--grid", "32"}).code == 0);
  const json integ = json::parse(slurp(fs::path(ws.dir("i")) / "integrability.json"));
  CHECK(integ.at("source") == "ellipse_offset");
  CHECK(integ.at("ellipse_offset_singularities").size() == 4);
  CHECK(integ.at("infinity").at("trichotomy_holds") == true);

  REQUIRE(invoke({"integrability", "--config", circ, "--out", ws.dir("ic"), "--grid", "32"}).code == 0);
  const json integ_c = json::parse(slurp(fs::path(ws.dir("ic")) / "integrability.json"));
  for (const auto& row : integ_c.at("residual_equation13")) CHECK(row.at("relative_deviation").get<double>() < 1e-8);

  REQUIRE(invoke({"gutkin-check", "--config", circ, "--out", ws.dir("g"), "--delta", "1.0"}).code == 0);
  const std::string zcsv = slurp(fs::path(ws.dir("g")) / "zindler.csv");
  CHECK(zcsv.rfind("phi_bar,d,exit_angle,pmx,pmy,ppx,ppy,mx,my,chord_len,mid_dist\n", 0) == 0);

  REQUIRE(invoke({"gutkin-construct", "--out", ws.dir("gc"), "--grid", "64"}).code == 0);
  const json gc = json::parse(slurp(fs::path(ws.dir("gc")) / "gutkin_construction.json"));
  const double ratio = gc.at("report").at("gutkin_ratio").get<double>();
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
  CHECK(gc.at("admissibility").at("pass") == false);
  // the constructed table can be fed back, but only past the strong-field guard
  const std::string built = ws.config("built.json", json{{"curve", gc.at("curve")}, {"beta", gc.at("beta")}}.dump());
  CHECK(invoke({"gutkin-check", "--config", built, "--out", ws.dir("gb")}).code == kExitValidation);
  CHECK(invoke({"gutkin-check", "--config", built, "--out", ws.dir("gb"), "--allow-weak-field"}).code == 0);

  const Run cubic_run = invoke({"circles-test", "--config", cubic, "--out", ws.dir("c")});
  REQUIRE(cubic_run.code == 0);
  const json cr = json::parse(slurp(fs::path(ws.dir("c")) / "circles_test.json"));
  CHECK(cr.at("all_circles_pass") == true);
  CHECK(cr.at("fit").at("max_residual").get<double>() < 1e-9);
  REQUIRE(invoke({"circles-test", "--config", expf, "--out", ws.dir("e"), "--n", "4"}).code == 0);
  CHECK(json::parse(slurp(fs::path(ws.dir("e")) / "circles_test.json")).at("all_circles_pass") == false);
}
