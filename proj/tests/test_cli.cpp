#include <doctest.h>

#include <cstdlib>
#include <string>

#include "test_support.hpp"

using qnet_test::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run(const std::string& command) {
    TempDir dir;
    const auto out_path = dir.path() / "stdout.txt";
    const std::string full = command + " > " + out_path.string() + " 2>/dev/null";
    const int status = std::system(full.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.stdout_text = qnet_test::read_file(out_path);
    return r;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then analyze round trip") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    const auto model = dir.write_file("model.json", qnet_test::study_model_json());
    const auto data = (dir.path() / "data.csv").string();

    const RunResult sim = run(bin + " simulate --model " + model.string() +
                              " --n 400 --seed 42 --out " + data);
    REQUIRE(sim.exit_code == 0);

    const RunResult analyze =
        run(bin + " analyze --data " + data + " --model " + model.string() + " --format json");
    REQUIRE(analyze.exit_code == 0);
    const auto report = nlohmann::json::parse(analyze.stdout_text);
    CHECK(report["estimates"]["n"] == 400);
    CHECK(report["adjust"] == "by");

    const RunResult estimate = run(bin + " estimate --data " + data + " --format table");
    REQUIRE(estimate.exit_code == 0);
    CHECK(estimate.stdout_text.find("n = 400") != std::string::npos);
    CHECK(estimate.stdout_text.find('*') != std::string::npos);
}

TEST_CASE("identical invocations are byte-identical") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    const auto model = dir.write_file("model.json", qnet_test::study_model_json());
    const auto d1 = (dir.path() / "a.csv").string();
    const auto d2 = (dir.path() / "b.csv").string();
    REQUIRE(run(bin + " simulate --model " + model.string() + " --n 150 --seed 7 --out " + d1)
                .exit_code == 0);
    REQUIRE(run(bin + " simulate --model " + model.string() + " --n 150 --seed 7 --out " + d2)
                .exit_code == 0);
    CHECK(qnet_test::read_file(d1) == qnet_test::read_file(d2));

    const RunResult r1 = run(bin + " analyze --data " + d1 + " --format json");
    const RunResult r2 = run(bin + " analyze --data " + d1 + " --format json");
    CHECK(r1.stdout_text == r2.stdout_text);
}

TEST_CASE("QNET_SEED overrides --seed") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    const auto model = dir.write_file("model.json", qnet_test::study_model_json());
    const auto with_flag = (dir.path() / "flag.csv").string();
    const auto with_env = (dir.path() / "env.csv").string();
    REQUIRE(run(bin + " simulate --model " + model.string() + " --n 50 --seed 9 --out " +
                with_flag)
                .exit_code == 0);
    REQUIRE(run("QNET_SEED=9 " + bin + " simulate --model " + model.string() +
                " --n 50 --seed 1234 --out " + with_env)
                .exit_code == 0);
    CHECK(qnet_test::read_file(with_flag) == qnet_test::read_file(with_env));
}

TEST_CASE("input errors exit with code 2") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    CHECK(run(bin + " analyze --data " + (dir.path() / "missing.csv").string()).exit_code == 2);

    const auto bad_model = dir.write_file("bad.json", R"({"columns": [0]})");
    CHECK(run(bin + " simulate --model " + bad_model.string() + " --n 5 --seed 1 --out " +
              (dir.path() / "x.csv").string())
              .exit_code == 2);

    const auto bad_csv = dir.write_file("bad.csv", "col_1,quality\n0,1.0\n");
    CHECK(run(bin + " estimate --data " + bad_csv.string()).exit_code == 2);

    CHECK(run(bin + " analyze").exit_code == 2);  // missing required option
}

TEST_CASE("insufficient data everywhere exits with code 3") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    const auto csv = dir.write_file("tiny.csv", "col_1,quality\n1,1.0\n2,2.0\n");
    const RunResult r = run(bin + " analyze --data " + csv.string() + " --format json");
    CHECK(r.exit_code == 3);
    const auto report = nlohmann::json::parse(r.stdout_text);
    CHECK(report["skipped"].size() == 3);  // mean, variance, bartlett
}

TEST_CASE("format defaults to json when stdout is piped") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    const auto csv = dir.write_file("d.csv", "col_1,quality\n1,1.0\n1,2.0\n2,1.5\n2,2.5\n");
    const RunResult r = run(bin + " analyze --data " + csv.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.rfind("{", 0) == 0);  // JSON object, not a table
}

TEST_CASE("kinds subset limits the analysis") {
    TempDir dir;
    const std::string bin = qnet_test::qnet_binary();
    const auto csv = dir.write_file("d.csv",
                                    "col_1,quality\n1,1.0\n1,2.0\n2,1.5\n2,2.5\n2,0.5\n");
    const RunResult r =
        run(bin + " analyze --data " + csv.string() + " --kinds mean --format json");
    REQUIRE(r.exit_code == 0);
    const auto report = nlohmann::json::parse(r.stdout_text);
    CHECK(report["mean_tests"].size() == 1);
    CHECK(report["variance_tests"].empty());
    CHECK(report["bartlett"].empty());
}

}  // TEST_SUITE
