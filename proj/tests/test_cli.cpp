#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

const char* cli_path() {
    const char* p = std::getenv("DEPOISSON_CLI");
    REQUIRE_MESSAGE(p != nullptr, "DEPOISSON_CLI must point at the built binary");
    return p;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(cli_path()) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("polyval prints exact polynomials and values") {
    RunResult tau = run("polyval tau 6");
    CHECK(tau.exit_code == 0);
    CHECK(contains(tau.out, "-15*x^3 + 130*x^2 - 120*x"));
    CHECK(contains(tau.out, "coeffs: 0 -120 130 -15"));

    RunResult rho = run("polyval rho 4 --x=-1");
    CHECK(rho.exit_code == 0);
    CHECK(contains(rho.out, "= 4"));

    CHECK(run("polyval stirling 4 2").out == "7\n");
    CHECK(run("polyval rb 4 5").out == "10\n");
    RunResult ch = run("polyval charlier 1 --lambda 1");
    CHECK(ch.exit_code == 0);
    CHECK(contains(ch.out, "x - 1"));
}

TEST_CASE("expand emits a schema-stable deterministic CSV") {
    std::string args = "expand --direction depoissonize --seq trie --n 64 --N 0..3";
    RunResult first = run(args);
    CHECK(first.exit_code == 0);
    CHECK(contains(first.out, "n,N,R,partial_sum,certified_bound,oracle_value,actual_error\n"));
    // header plus one row per order
    int lines = 0;
    for (char c : first.out) lines += c == '\n';
    CHECK(lines == 5);
    CHECK(contains(first.out, "64,0,64,"));
    CHECK(contains(first.out, "64,3,64,"));
    // byte-identical across runs
    CHECK(run(args).out == first.out);
}

TEST_CASE("expand flat records carry term breakdowns") {
    RunResult res = run(
        "expand --direction inverse --seq geom:1:1/2 --n 20 --N 2 --format flat");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "n=20\n"));
    CHECK(contains(res.out, "partial_sum="));
    CHECK(contains(res.out, "certified_bound="));
    CHECK(contains(res.out, "term.0.diff="));
    CHECK(contains(res.out, "term.2.value="));
}

TEST_CASE("expand supports grids over n, N and R") {
    RunResult res = run(
        "expand --direction depoissonize --seq geom:2/3:1/2,1/3:1/3 --n 8,16 --N 0..1 --R 8,12");
    CHECK(res.exit_code == 0);
    int lines = 0;
    for (char c : res.out) lines += c == '\n';
    CHECK(lines == 9);  // header + 2*2*2 rows in row-major n, N, R order
    std::size_t first8 = res.out.find("\n8,");
    std::size_t first16 = res.out.find("\n16,");
    CHECK(first8 != std::string::npos);
    CHECK(first16 != std::string::npos);
    CHECK(first8 < first16);
}

TEST_CASE("ramanujan direction runs over R grids without n") {
    RunResult res = run("expand --direction ramanujan --seq geom:1:1/2 --N 2 --R 64,128");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, ",2,64,"));
    CHECK(contains(res.out, ",2,128,"));
}

TEST_CASE("verify identities passes") {
    RunResult res = run("verify identities");
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "PASS - polynomial tables"));
    CHECK(contains(res.out, "0 failed"));
}

TEST_CASE("usage errors exit with code 3") {
    CHECK(run("frobnicate").exit_code == 3);
    CHECK(run("expand --direction sideways --seq trie --n 4 --N 1").exit_code == 3);
    CHECK(run("expand --direction inverse --seq bogus:1 --n 4 --N 1").exit_code == 3);
    CHECK(run("expand --direction inverse --seq file:no_such_file.txt --n 4 --N 1").exit_code ==
          3);
    CHECK(run("polyval charlier 2").exit_code == 3);  // missing --lambda
    CHECK(run("verify everything").exit_code == 3);
}

TEST_CASE("file-backed sequences flow through the expansion") {
    std::string path = "cli_seq_input.txt";
    {
        std::ofstream out(path);
        out << "# offset 0\n";
        for (int m = 0; m < 200; ++m) out << "5/2\n";
    }
    RunResult res = run("expand --direction depoissonize --seq file:" + path + " --n 8 --N 2");
    std::remove(path.c_str());
    CHECK(res.exit_code == 0);
    CHECK(contains(res.out, "8,2,8,2.5"));
}
