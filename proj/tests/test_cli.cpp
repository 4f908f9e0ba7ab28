#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gwgl/cli.hpp"
#include "schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = gwgl::cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> schema_errors(const json& value, const std::string& name) {
    const json s = load(fs::path(GWGL_SCHEMA_DIR) / (name + ".schema.json"));
    return schema::validate(value, s);
}

#define CHECK_SCHEMA(value, name)                                  \
    do {                                                           \
        const auto errs_ = schema_errors(value, name);             \
        for (const auto& e_ : errs_) MESSAGE(name << ": " << e_);  \
        CHECK(errs_.empty());                                      \
    } while (0)

// One scratch directory with a generated dataset shared by the cases below.
struct Workspace {
    fs::path dir;
    std::string data;
    std::string binary;

    Workspace() {
        dir = fs::temp_directory_path() / ("gwgl_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        data = path("a.csv");
        binary = path("b.csv");
        REQUIRE(cli({"generate", "--seed", "7", "--rho", "0.5", "--outlier-prob", "0.3", "-o", data}).code == 0);
        REQUIRE(cli({"generate", "--seed", "8", "--rho", "0.5", "--binary", "-o", binary}).code == 0);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

Workspace& ws() {
    static Workspace w;
    return w;
}

}  // namespace

TEST_CASE("generate is deterministic and writes a metadata sidecar") {
    const auto a = ws().path("g1.csv"), b = ws().path("g2.csv");
    REQUIRE(cli({"generate", "--seed", "7", "-o", a}).code == 0);
    REQUIRE(cli({"generate", "--seed", "7", "-o", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a + ".meta.json") == slurp(b + ".meta.json"));
    const json meta = load(ws().data + ".meta.json");
    CHECK_SCHEMA(meta, "dataset-meta");
    CHECK(meta["rng"] == "mt19937_64");
    CHECK(meta["seed"] == 7);
    REQUIRE(cli({"generate", "--seed", "8", "-o", b}).code == 0);
    CHECK(slurp(a) != slurp(b));
}

TEST_CASE("usage and IO errors exit with 2 and name the culprit") {
    auto r = cli({"fit", "--model", "gwgl-lr", "--data", ws().path("missing.csv"), "--epsilon", "0.1",
                  "--auto-cluster"});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.csv") != std::string::npos);

    r = cli({"fit", "--data", ws().data, "--epsilon", "0.1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--groups") != std::string::npos);

    r = cli({"fit", "--data", ws().data, "--auto-cluster"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--epsilon") != std::string::npos);

    r = cli({"fit", "--data", ws().data, "--auto-cluster", "--epsilon", "0.1", "--tune"});
    CHECK(r.code == 2);

    r = cli({"fit", "--data", ws().data, "--auto-cluster", "--epsilon", "0.1", "--model", "svm"});
    CHECK(r.code == 2);
    CHECK(r.err.find("svm") != std::string::npos);

    r = cli({"fit", "--data", ws().data, "--auto-cluster", "--epsilon", "0.1", "--response", "nope"});
    CHECK(r.code == 2);
    CHECK(r.err.find("nope") != std::string::npos);

    r = cli({"fit", "--data", ws().data, "--auto-cluster", "--epsilon", "0.1", "-o",
             ws().path("no/such/dir/m.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("--out") != std::string::npos);

    r = cli({"oracle-check", "mixture", "--q", "1.5"});
    CHECK(r.code == 2);

    r = cli({"bogus"});
    CHECK(r.code == 2);

    // Continuous responses are not labels.
    r = cli({"fit", "--model", "gwgl-lg", "--data", ws().data, "--auto-cluster", "--epsilon", "0.1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("row") != std::string::npos);

    std::ofstream(ws().path("bad_groups.json")) << R"({"p": 16, "groups": [[0, 1]], "overlapping": false})";
    r = cli({"fit", "--data", ws().data, "--groups", ws().path("bad_groups.json"), "--epsilon", "0.1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("bad_groups.json") != std::string::npos);
}

TEST_CASE("non-convergence exits with 3 and still writes the model") {
    const auto m = ws().path("short.json");
    const auto r = cli({"fit", "--data", ws().data, "--auto-cluster", "--epsilon", "0.001", "--max-iters", "12",
                        "-o", m});
    CHECK(r.code == 3);
    CHECK(load(m)["fit"]["converged"] == false);
}

TEST_CASE("oracle-check mixture reports (1-q)/q") {
    const auto r = cli({"oracle-check", "mixture", "--q", "0.2", "--seed", "1"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK_SCHEMA(j, "oracle-mixture");
    CHECK(std::abs(j["ratio"].get<double>() - 4.0) <= 1e-9);
    CHECK(j["pass"] == true);
}

TEST_CASE("fit then evaluate reproduces the training objective exactly") {
    struct Case {
        std::vector<std::string> args;
        std::string data;
    };
    std::ofstream(ws().path("overlap.json"))
        << R"({"p": 16, "groups": [[0,1,2,3], [3,4,5,6,7,8], [8,9,10,11,12,13,14,15]], "overlapping": true})";
    std::ofstream(ws().path("planted.json"))
        << R"({"p": 16, "groups": [[0], [1,2,3], [4,5,6,7,8], [9,10,11,12,13,14,15]], "overlapping": false})";
    const std::vector<Case> cases{
        {{"--model", "gwgl-lr", "--groups", ws().path("planted.json"), "--tune"}, ws().data},
        {{"--model", "glasso-l2", "--auto-cluster", "--clusters", "4", "--epsilon", "0.05"}, ws().data},
        {{"--model", "gwgl-lg", "--auto-cluster", "--tune"}, ws().binary},
        {{"--model", "latent-overlap", "--groups", ws().path("overlap.json"), "--epsilon", "0.02"}, ws().data},
        {{"--model", "gwgl-lr", "--groups", ws().path("planted.json"), "--epsilon", "0.01", "--no-standardize"},
         ws().data},
    };
    int k = 0;
    for (const auto& c : cases) {
        CAPTURE(k);
        const auto model = ws().path("model" + std::to_string(k) + ".json");
        const auto report = ws().path("eval" + std::to_string(k) + ".json");
        std::vector<std::string> args{"fit", "--data", c.data, "--seed", "3", "-o", model};
        args.insert(args.end(), c.args.begin(), c.args.end());
        const auto f = cli(args);
        INFO(f.err);
        REQUIRE(f.code == 0);
        const json m = load(model);
        CHECK_SCHEMA(m, "model");
        REQUIRE(cli({"evaluate", "--model", model, "--data", c.data, "-o", report}).code == 0);
        const json e = load(report);
        CHECK_SCHEMA(e, "evaluation");
        CHECK(e["objective"].get<double>() == m["fit"]["objective"].get<double>());
        CHECK(e["objective"].get<double>() == e["training_objective"].get<double>());
        ++k;
    }
}

TEST_CASE("evaluate scores against the generator's ground truth") {
    const auto model = ws().path("truth_model.json");
    REQUIRE(cli({"fit", "--data", ws().data, "--auto-cluster", "--clusters", "4", "--tune", "-o", model}).code == 0);
    const auto r = cli({"evaluate", "--model", model, "--data", ws().data});
    REQUIRE(r.code == 0);
    const json e = json::parse(r.out);
    REQUIRE(!e["oracle"].is_null());
    CHECK(e["oracle"]["ideal"]["rr"] == 0.0);
    CHECK(e["oracle"]["ideal"]["rte"] == 1.0);
    CHECK(e["oracle"]["null"]["pve"] == 0.0);
    CHECK(e["oracle"]["estimate"]["rte"].get<double>() >= 1.0);

    // Data with different columns is refused.
    std::ofstream(ws().path("narrow.csv")) << "x1,y\n1,2\n3,4\n";
    const auto bad = cli({"evaluate", "--model", model, "--data", ws().path("narrow.csv")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("columns") != std::string::npos);
}

TEST_CASE("every subcommand's report validates and is byte-identical across runs") {
    struct Case {
        std::string schema;
        std::vector<std::string> args;  // the output path is appended
    };
    const std::vector<Case> cases{
        {"groups", {"cluster", "--data", ws().data, "--seed", "2"}},
        {"model", {"fit", "--data", ws().data, "--auto-cluster", "--tune", "--seed", "2"}},
        {"tuning", {"tune", "--model", "glasso-l2", "--data", ws().data, "--auto-cluster", "--seed", "2"}},
        {"oracle-mixture", {"oracle-check", "mixture", "--q", "0.3", "--trials", "5", "--seed", "2"}},
        {"oracle-dro-bound", {"oracle-check", "dro-bound", "--trials", "20", "--seed", "2"}},
        {"oracle-dual-norm", {"oracle-check", "dual-norm", "--trials", "50", "--seed", "2"}},
        {"oracle-grouping", {"oracle-check", "grouping", "--seed", "2"}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.schema);
        std::vector<std::string> first = c.args, second = c.args;
        const auto p1 = ws().path(c.schema + "_1.json"), p2 = ws().path(c.schema + "_2.json");
        first.insert(first.end(), {"-o", p1});
        second.insert(second.end(), {"-o", p2});
        const auto r1 = cli(first);
        INFO(r1.err);
        REQUIRE(r1.code == 0);
        REQUIRE(cli(second).code == 0);
        CHECK(slurp(p1) == slurp(p2));
        CHECK_SCHEMA(load(p1), c.schema);
    }
    const json diag = load(ws().path("groups_1.diagnostics.json"));
    CHECK_SCHEMA(diag, "cluster-diagnostics");
    CHECK(slurp(ws().path("tuning_1.csv")).rfind("index,epsilon,validation_loss,chosen\n", 0) == 0);

    const auto model = ws().path("model_1.json");
    const auto e1 = cli({"evaluate", "--model", model, "--data", ws().data});
    const auto e2 = cli({"evaluate", "--model", model, "--data", ws().data});
    CHECK(e1.code == 0);
    CHECK(e1.out == e2.out);
}

TEST_CASE("sweep writes tables, MPI and a summary deterministically") {
    const auto d1 = ws().path("sweep1"), d2 = ws().path("sweep2");
    const std::vector<std::string> base{"sweep", "--datasets", "2", "--values", "0.5,2", "--seed", "5"};
    auto a1 = base, a2 = base;
    a1.insert(a1.end(), {"-o", d1});
    a2.insert(a2.end(), {"-o", d2});
    REQUIRE(cli(a1).code == 0);
    REQUIRE(cli(a2).code == 0);
    for (const std::string f : {"mad.csv", "rr.csv", "rte.csv", "pve.csv", "mpi.json", "sweep.json"}) {
        CAPTURE(f);
        CHECK(slurp(fs::path(d1) / f) == slurp(fs::path(d2) / f));
    }
    CHECK_SCHEMA(load(fs::path(d1) / "mpi.json"), "sweep-mpi");
    CHECK_SCHEMA(load(fs::path(d1) / "sweep.json"), "sweep");
    const std::string mad = slurp(fs::path(d1) / "mad.csv");
    CHECK(mad.rfind("snr,method,mad\n", 0) == 0);
    const std::string rr = slurp(fs::path(d1) / "rr.csv");
    CHECK(rr.find(",ideal,0\n") != std::string::npos);
    CHECK(rr.find(",null,1\n") != std::string::npos);

    const auto bad = cli({"sweep", "--methods", "gwgl-lg", "-o", ws().path("sweep3")});
    CHECK(bad.code == 2);
}

TEST_CASE("help exits 0") {
    const auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("oracle-check") != std::string::npos);
}
