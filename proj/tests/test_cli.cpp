#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <jetsym/expr.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace
{

struct result {
    int code;
    std::string out;
};

result run(const std::string &args)
{
    std::string cmd = std::string(JETSYM_CLI) + " " + args + " 2>/dev/null";
    FILE *p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (auto n = fread(buf.data(), 1, buf.size(), p)) {
        out.append(buf.data(), n);
    }
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string &s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

} // namespace

TEST_CASE("generators")
{
    auto r = run("generators --n 4");
    CHECK(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 8);
    CHECK(ls[2] == "V2: 0 ; u*v^2");
    CHECK(ls[7] == "H: -v^2 ; -3*v*v1*y");
    auto j = run("generators --n 2 --json");
    CHECK(j.code == 0);
    CHECK(j.out.find("\"generators\"") != std::string::npos);
}

TEST_CASE("printed expressions re-parse")
{
    for (const char *args : {"build-lode --n 4", "lagrangian --n 4 --kind natural", "lagrangian --n 6 --kind transformed",
                             "first-integral --vf \"0;y\" --n 5", "build-lode --n 3 --q x^2"}) {
        auto r = run(args);
        CAPTURE(args);
        CHECK(r.code == 0);
        auto text = lines(r.out).at(0);
        CHECK(jetsym::to_string(jetsym::parse(text)) == text);
    }
    CHECK(lines(run("first-integral --vf \"0;y\" --n 3").out).at(0) == "2*q*y^2 + y*y2 - 1/2*y1^2");
    CHECK(lines(run("build-lode --n 4 --q 0").out).at(0) == "y4");
}

TEST_CASE("checks and exit codes")
{
    CHECK(run("check --kind divergence --vf \"0;y\" --eq \"y2+q*y\"").code == 2);
    CHECK(run("check --kind divergence --vf \"0;y\" --eq \"y3 + 4*q*y1 + 2*q1*y\" --order 3").code == 0);
    CHECK(run("check --kind divergence --vf \"0;y\" --eq \"y2 + q*y\" --order 3").code == 2);
    CHECK(run("check --kind lie --vf \"1;0\" --eq \"y2 + q*y\" --order 2").code == 1);
    CHECK(run("check --kind variational --vf \"0;u^3\" --lagrangian \"y2^2/2\" --order 2 --q 0").code == 0);
    CHECK(run("first-integral --vf \"0;y\" --n 4").code == 1);
    CHECK(run("build-lode --n 3 --q \"y +\"").code == 2);
    CHECK(run("build-lode --n 1").code == 2);
    CHECK(run("generators --n 4 --bogus").code == 2);
    CHECK(run("lagrangian --n 3 --kind natural").code == 2);
}

TEST_CASE("transform")
{
    auto r = run("transform --map \"z=x; w=k2-ln(y)\" --vf \"-z^2;-3*z*w\"");
    CHECK(r.code == 0);
    CHECK(lines(r.out).at(0) == "-x^2 ; 3*k2*x*y - 3*x*y*ln(y)");
    auto e = run("transform --map \"z=x; w=k2-ln(y)\" --integral \"w3\"");
    CHECK(e.code == 0);
    CHECK(run("transform --map \"z=x\" --eq w4").code == 2);
}

TEST_CASE("reproduce")
{
    const std::string path = "cli_c1.json";
    auto r = run("reproduce C1 --json " + path);
    CHECK(r.code == 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().rfind("{\"case\":\"C1\",\"claims\":[", 0) == 0);
    CHECK(run("reproduce C2").code == 1);
    CHECK(run("reproduce C42").code == 2);
}
