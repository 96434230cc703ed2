#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(INFPROP_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string data(const std::string& name) { return std::string(INFPROP_DATA_DIR) + "/" + name; }

std::string golden(const std::string& name) {
    std::ifstream in(std::string(INFPROP_GOLDEN_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("propagate student") {
    auto r = run("propagate " + data("student.fop"));
    CHECK(r.status == 0);
    CHECK(r.out == golden("student_propagate.txt"));
    // same bytes on every run, and from stdin
    CHECK(run("propagate " + data("student.fop")).out == r.out);
    CHECK(run("propagate < " + data("student.fop")).out == r.out);
    // the oracle reaches the same structure here
    CHECK(run("propagate --oracle " + data("student.fop")).out == r.out);
}

TEST_CASE("trace lists steps and propagators") {
    auto r = run("propagate --trace " + data("student.fop"));
    CHECK(r.status == 0);
    CHECK(r.out.find("// step 1 inf:") != std::string::npos);
    CHECK(r.out.find("Selected(c3)=t") != std::string::npos);
    CHECK(r.out.find("structure {") != std::string::npos);
}

TEST_CASE("normalize and emit-rules") {
    auto enf = run("normalize --enf " + data("student.fop"));
    CHECK(enf.status == 0);
    CHECK(enf.out == golden("student_enf.txt"));
    auto rules = run("emit-rules " + data("student.fop"));
    CHECK(rules.status == 0);
    CHECK(rules.out == golden("student_rules.txt"));
    auto inf = run("normalize --inf " + data("student.fop"));
    CHECK(inf.status == 0);
    CHECK(inf.out.find("! m : Module(m) & Selected(m) => Aux2(m).") != std::string::npos);
}

TEST_CASE("check") {
    auto ok = run("check " + data("student.fop"));
    CHECK(ok.status == 0);
    CHECK(ok.out.rfind("ok:", 0) == 0);
    auto bad = run("check " + data("malformed.fop"));
    CHECK(bad.status == 1);
    CHECK(bad.out.find("malformed.fop:3:15:") != std::string::npos);
    CHECK(run("check /nonexistent/problem.fop").status == 1);
}

TEST_CASE("symbolic and rewrite") {
    auto s = run("symbolic --rounds 1 " + data("student.fop"));
    CHECK(s.status == 0);
    CHECK(s.out.find("Selected_ct = { x : ") != std::string::npos);
    auto q = run("rewrite --rounds 1 --query \"{ c : Selected(c) }\" " + data("student.fop"));
    CHECK(q.status == 0);
    CHECK(q.out.rfind("certain = { c : ", 0) == 0);
    CHECK(q.out.find("\npossible = { c : ") != std::string::npos);
    CHECK(run("rewrite --certain --possible --query \"{ c : Selected(c) }\" " + data("student.fop")).status != 0);
}

TEST_CASE("bad usage") {
    CHECK(run("propagate --bogus " + data("student.fop")).status != 0);
    CHECK(run("").status != 0);
}
