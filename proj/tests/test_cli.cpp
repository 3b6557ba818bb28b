#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "intertwiner/dynamics.hpp"
#include "intertwiner/intertwine.hpp"
#include "intertwiner/json_io.hpp"
#include "intertwiner/models.hpp"
#include "test_util.hpp"

using namespace intertwiner;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string cli = INTERTWINER_CLI_PATH;

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("intertwiner_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = "\"" + cli + "\" " + args;
    if (!stdout_path.empty()) cmd += " > " + stdout_path;
    cmd += " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("cli: model -> analyze round trip recovers the declared structure") {
    Scratch s;
    REQUIRE(run("model pt-spin -D 3 -J 1 --gamma 0.5 -o " + s.path("h3.json")) == 0);

    const json model = read_json_file(s.path("h3.json"));
    CHECK(model["n"] == 3);
    CHECK(testutil::mat_close(matrix_from_json(model["seed"]), parity(3), 1e-14));
    CHECK(model["symmetries"][0]["class"] == "PT");

    REQUIRE(run("analyze " + s.path("h3.json"), s.path("report.json")) == 0);
    const json report = json::parse(slurp(s.path("report.json")));
    CHECK(report["n"] == 3);
    CHECK(report["clusters"].size() == 3);
    for (const auto& c : report["clusters"]) CHECK(c["kind"] == "nondegenerate");
    bool pt = false;
    for (const auto& sym : report["symmetries"]) pt = pt || sym["class"] == "PT";
    CHECK(pt);
    CHECK(report["diagonalizable"] == true);
}

TEST_CASE("cli: analyze flags the third-order exceptional point") {
    Scratch s;
    REQUIRE(run("model pt-spin -D 3 -J 1 --gamma 1.0 -o " + s.path("ep.json")) == 0);
    REQUIRE(run("analyze " + s.path("ep.json"), s.path("report.json")) == 0);
    const json report = json::parse(slurp(s.path("report.json")));
    REQUIRE(report["clusters"].size() == 1);
    CHECK(report["clusters"][0]["kind"] == "exceptional");
    CHECK(report["clusters"][0]["order"] == 3);
    CHECK(report["clusters"][0]["algebraic"] == 3);
    CHECK(report["clusters"][0]["geometric"] == 1);
    CHECK(report["diagonalizable"] == false);
}

TEST_CASE("cli: conserve recursive reproduces the parity tower") {
    Scratch s;
    REQUIRE(run("model pt-spin -D 3 -J 1 --gamma 0.5 -o " + s.path("h3.json")) == 0);
    REQUIRE(run("conserve " + s.path("h3.json") + " --method recursive", s.path("etas.json")) ==
            0);

    const json out = json::parse(slurp(s.path("etas.json")));
    CHECK(out["construction"] == "recursive");
    CHECK(out["count"] == 3);
    REQUIRE(out["etas"].size() == 3);

    const CMatrix h = build_pt_spin({3, 1.0, 0.5}).h;
    const CMatrix p3 = parity(3);
    CHECK(testutil::mat_close(matrix_from_json(out["etas"][0]["matrix"]), p3, 1e-13));
    CHECK(testutil::mat_close(matrix_from_json(out["etas"][1]["matrix"]), CMatrix(p3 * h), 1e-13));
    CHECK(testutil::mat_close(matrix_from_json(out["etas"][2]["matrix"]), CMatrix(p3 * h * h),
                              1e-13));
    for (const auto& e : out["etas"]) CHECK(e["residual"].get<double>() <= 1e-12);
}

TEST_CASE("cli: conserve nullspace and spectral counts") {
    Scratch s;
    write_json_file(s.path("id3.json"), matrix_to_json(CMatrix::Identity(3, 3)));
    REQUIRE(run("conserve " + s.path("id3.json") + " --method nullspace", s.path("out.json")) ==
            0);
    CHECK(json::parse(slurp(s.path("out.json")))["count"] == 9);

    CMatrix dia = CMatrix::Zero(3, 3);
    dia(0, 0) = dia(1, 1) = 0.7;
    dia(2, 2) = -1.3;
    write_json_file(s.path("dia.json"), matrix_to_json(dia));
    REQUIRE(run("conserve " + s.path("dia.json") + " --method spectral", s.path("out2.json")) ==
            0);
    CHECK(json::parse(slurp(s.path("out2.json")))["count"] == 5);
}

TEST_CASE("cli: evolve writes a flat drift table for a conserved operator") {
    Scratch s;
    REQUIRE(run("model dimer -J 1 --gamma 0.6 -o " + s.path("h2.json")) == 0);
    REQUIRE(run("conserve " + s.path("h2.json") + " --method recursive", s.path("etas.json")) ==
            0);
    REQUIRE(run("evolve " + s.path("h2.json") + " --etas " + s.path("etas.json") +
                    " --tmax 20 --steps 501 -o " + s.path("drift.csv"),
                s.path("summary.txt")) == 0);

    const std::string summary = slurp(s.path("summary.txt"));
    CHECK(summary.find("max_relative_drift") != std::string::npos);
    const double drift = std::stod(summary.substr(summary.find(' ') + 1));
    CHECK(drift <= 1e-8);

    std::istringstream csv(slurp(s.path("drift.csv")));
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("t,norm,eta_1", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 501);
}

TEST_CASE("cli: evolve with a gamma shift keeps the compensated series flat") {
    Scratch s;
    REQUIRE(run("model dimer -J 1 --gamma 0.8 -o " + s.path("h2.json")) == 0);
    REQUIRE(run("evolve " + s.path("h2.json") + " --tmax 10 --steps 201 --gamma-shift 0.4 -o " +
                    s.path("drift.csv"),
                s.path("summary.txt")) == 0);
    const std::string summary = slurp(s.path("summary.txt"));
    const double drift = std::stod(summary.substr(summary.find(' ') + 1));
    CHECK(drift <= 1e-8);
}

TEST_CASE("cli: evolve accepts a state file and shows broken-phase norm growth") {
    Scratch s;
    REQUIRE(run("model dimer -J 1 --gamma 1.3 -o " + s.path("h2.json")) == 0);
    CVector psi(2);
    psi << Complex(0.6, 0.0), Complex(0.0, 0.8);
    write_json_file(s.path("state.json"), vector_to_json(psi));
    REQUIRE(run("evolve " + s.path("h2.json") + " --state " + s.path("state.json") +
                    " --tmax 10 --steps 101 -o " + s.path("drift.csv"),
                s.path("summary.txt")) == 0);

    // norm column grows while the eta columns stay flat
    std::istringstream csv(slurp(s.path("drift.csv")));
    std::string line, first_row, last_row;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
        if (first_row.empty()) first_row = line;
        if (!line.empty()) last_row = line;
    }
    auto field = [](const std::string& row, int idx) {
        size_t from = 0;
        for (int i = 0; i < idx; ++i) from = row.find(',', from) + 1;
        return std::stod(row.substr(from));
    };
    CHECK(field(first_row, 1) == doctest::Approx(1.0));  // <psi0|psi0>
    CHECK(field(last_row, 1) > 100.0);
    const double drift = std::stod(slurp(s.path("summary.txt"))
                                       .substr(slurp(s.path("summary.txt")).find(' ') + 1));
    CHECK(drift <= 1e-8);
}

TEST_CASE("cli: circuit and dimer model files") {
    Scratch s;
    REQUIRE(run("model circuit --mu 0.5 --gamma 1.0 -o " + s.path("circuit.json")) == 0);
    const json circuit = read_json_file(s.path("circuit.json"));
    CHECK(circuit["n"] == 4);
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    CHECK(testutil::mat_close(matrix_from_json(circuit["seed"]),
                              kron(CMatrix::Identity(2, 2), sx), 1e-14));
    CircuitParams ref;
    ref.mu = 0.5;
    CHECK(circuit["params"]["gamma0"].get<double>() == doctest::Approx(ref.gamma0()));

    REQUIRE(run("model dimer -J 1 --gamma 0.0 -o " + s.path("dimer.json")) == 0);
    const CMatrix h = matrix_from_json(read_json_file(s.path("dimer.json")));
    CHECK(testutil::mat_close(h, CMatrix(sx / 2.0), 1e-15));
    CHECK((h - h.adjoint()).norm() <= 1e-15);
}

TEST_CASE("cli: floquet emits the propagator, the eta set, and the period table") {
    Scratch s;
    const CMatrix hp = build_dimer(1.0, 0.5).h;
    const CMatrix hm = hp.conjugate();
    json segments;
    segments["segments"] = json::array(
        {{{"h", matrix_to_json(hp)}, {"tau", 0.5}}, {{"h", matrix_to_json(hm)}, {"tau", 0.5}}});
    write_json_file(s.path("drive.json"), segments);

    REQUIRE(run("floquet " + s.path("drive.json") + " --periods 100 --out-gf " + s.path("gf.json") +
                    " --out-etas " + s.path("etas.json") + " --out-csv " + s.path("strobe.csv"),
                s.path("summary.txt")) == 0);

    const CMatrix gf = matrix_from_json(read_json_file(s.path("gf.json")));
    const CMatrix expect = floquet_propagator(FloquetDrive({{hp, 0.5}, {hm, 0.5}}));
    CHECK(testutil::mat_close(gf, expect, 1e-13));

    const json etas = read_json_file(s.path("etas.json"));
    CHECK(etas["count"].get<int>() >= 1);

    std::istringstream csv(slurp(s.path("strobe.csv")));
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 101);  // p = 0..100

    const std::string summary = slurp(s.path("summary.txt"));
    const double drift = std::stod(summary.substr(summary.rfind(' ') + 1));
    CHECK(drift <= 1e-8);
}

TEST_CASE("cli: single-segment floquet equals the matrix exponential") {
    Scratch s;
    const CMatrix h = build_dimer(1.0, 0.4).h;
    json segments;
    segments["segments"] = json::array({{{"h", matrix_to_json(h)}, {"tau", 1.3}}});
    write_json_file(s.path("drive.json"), segments);
    REQUIRE(run("floquet " + s.path("drive.json") + " --periods 3 --out-gf " + s.path("gf.json") +
                    " --out-etas " + s.path("e.json") + " --out-csv " + s.path("c.csv"),
                s.path("sum.txt")) == 0);
    CHECK(testutil::mat_close(matrix_from_json(read_json_file(s.path("gf.json"))),
                              expm(Complex(0, -1.3) * h), 1e-13));
}

TEST_CASE("cli: exit codes distinguish input, numerical, and no-symmetry failures") {
    Scratch s;
    // missing file
    CHECK(run("analyze " + s.path("nope.json")) == 1);
    // malformed JSON
    std::ofstream(s.path("bad.json")) << "{ not json";
    CHECK(run("analyze " + s.path("bad.json")) == 1);
    // schema violation
    std::ofstream(s.path("short.json")) << R"({"n": 2, "data": [[[1,0]]]})";
    CHECK(run("conserve " + s.path("short.json")) == 1);
    // invalid model parameters
    CHECK(run("model circuit --mu 1.2 --gamma 1.0 -o " + s.path("c.json")) == 1);
    // empty drive
    std::ofstream(s.path("empty.json")) << R"({"segments": []})";
    CHECK(run("floquet " + s.path("empty.json")) == 1);
    // spectrum without any antilinear symmetry: recursive seeding must fail
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = Complex(0.3, 0.7);
    h(1, 1) = Complex(-0.2, 0.1);
    write_json_file(s.path("asym.json"), matrix_to_json(h));
    CHECK(run("conserve " + s.path("asym.json") + " --method recursive") == 3);
    // ... while analyze reports an empty symmetry list and succeeds
    REQUIRE(run("analyze " + s.path("asym.json"), s.path("rep.json")) == 0);
    CHECK(json::parse(slurp(s.path("rep.json")))["symmetries"].empty());
}

TEST_CASE("cli: every model file analyzes back to its declared class") {
    Scratch s;
    const std::vector<std::string> builds = {
        "model pt-spin -D 4 -J 1 --gamma 0.7 -o ",
        "model hatano-nelson -D 3 -J 1 --gamma 0.4 -o ",
        "model circuit --mu 0.4 --gamma 0.3 -o ",
        "model dimer -J 1 --gamma 0.5 -o ",
    };
    for (size_t i = 0; i < builds.size(); ++i) {
        const std::string file = s.path("m" + std::to_string(i) + ".json");
        REQUIRE(run(builds[i] + file) == 0);
        REQUIRE(run("analyze " + file, s.path("rep.json")) == 0);
        const json report = json::parse(slurp(s.path("rep.json")));
        const std::string declared =
            read_json_file(file)["symmetries"][0]["class"].get<std::string>();
        bool found = false;
        for (const auto& sym : report["symmetries"]) found = found || sym["class"] == declared;
        CHECK(found);
    }
}

TEST_CASE("cli: runs are deterministic and honor INTERTWINER_TOL") {
    Scratch s;
    REQUIRE(run("model hatano-nelson -D 3 -J 1 --gamma 0.4 -o " + s.path("hn.json")) == 0);
    REQUIRE(run("conserve " + s.path("hn.json") + " --method nullspace", s.path("a.json")) == 0);
    REQUIRE(run("conserve " + s.path("hn.json") + " --method nullspace", s.path("b.json")) == 0);
    CHECK(slurp(s.path("a.json")) == slurp(s.path("b.json")));

    const int code = std::system(("INTERTWINER_TOL=1e-9 \"" + cli + "\" conserve " +
                                  s.path("hn.json") + " > /dev/null 2>&1")
                                     .c_str());
    CHECK(WEXITSTATUS(code) == 0);
}
