#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(NHSR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

long count_lines(const std::string& text) {
    long n = 0;
    for (const char c : text)
        if (c == '\n') ++n;
    return n;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("nhsr_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("spectrum emits csv sidecar and manifest") {
    TempDir dir("spectrum");
    REQUIRE(run_cli("spectrum --model pt2 --d 16 -o " + dir.str()) == 0);
    CHECK(fs::exists(dir.path / "manifest.json"));
    CHECK(fs::exists(dir.path / "spectrum.json"));
    const std::string csv = slurp(dir.path / "spectrum.csv");
    CHECK(count_lines(csv) == 17);  // header + 16 levels
    CHECK(csv.rfind("k,energy\n", 0) == 0);
}

TEST_CASE("config errors exit with code one") {
    TempDir dir("badcfg");
    CHECK(run_cli("spectrum --model nope -o " + dir.str()) == 1);
    CHECK(run_cli("widths --d 8 --n 9 --nr 2 -o " + dir.str()) == 1);
    CHECK(run_cli("widths --d 8 --n 4 --gamma -3 --nr 2 -o " + dir.str()) == 1);
    CHECK(run_cli("two-level --theta 0 -o " + dir.str()) == 1);
    CHECK(run_cli("sweep --gamma oops --nr 1 -o " + dir.str()) == 1);
    CHECK(run_cli("no-such-command") == 1);
}

TEST_CASE("two level run") {
    TempDir dir("twolevel");
    REQUIRE(run_cli("two-level --eps 0 --gamma 1e-1:1e1:25log -o " + dir.str()) == 0);
    const std::string csv = slurp(dir.path / "two_level.csv");
    CHECK(count_lines(csv) == 26);  // header + one eps value x 25 grid points
    CHECK(csv.rfind("eps,gamma,width1,width2,energy1,energy2\n", 0) == 0);
}

TEST_CASE("worker count does not change the bytes") {
    TempDir d1("workers1"), d4("workers4");
    const std::string common =
        "widths --model ho --d 8 --n 4 --eps 0 --gamma 2.5 --nr 12 --seed 77 ";
    REQUIRE(run_cli(common + "--workers 1 -o " + d1.str()) == 0);
    REQUIRE(run_cli(common + "--workers 4 -o " + d4.str()) == 0);
    const std::string a = slurp(d1.path / "widths.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(d4.path / "widths.csv"));
}

TEST_CASE("second run reuses the cached parts") {
    TempDir dir("resume");
    const std::string cmd =
        "widths --model ho --d 8 --n 4 --gamma 1.0 --nr 10 --seed 5 -o " + dir.str();
    REQUIRE(run_cli(cmd) == 0);
    const std::string first = slurp(dir.path / "widths.csv");
    REQUIRE(run_cli(cmd) == 0);
    CHECK(slurp(dir.path / "widths.csv") == first);
    // the manifest reports all realizations as served from cache
    const std::string manifest = slurp(dir.path / "manifest.json");
    CHECK(manifest.find("\"cached\": 10") != std::string::npos);
    CHECK(manifest.find("\"computed\": 0") != std::string::npos);
    // a changed config invalidates the cache
    REQUIRE(run_cli("widths --model ho --d 8 --n 4 --gamma 2.0 --nr 10 --seed 5 -o " +
                    dir.str()) == 0);
    const std::string manifest2 = slurp(dir.path / "manifest.json");
    CHECK(manifest2.find("\"computed\": 10") != std::string::npos);
}

TEST_CASE("sweep csv layout") {
    TempDir dir("sweep");
    REQUIRE(run_cli("sweep --model ho --d 4 --n 2 --eps 0 --gamma 1e-1:1e1:10log "
                    "--nr 3 --seed 9 -o " + dir.str()) == 0);
    const std::string csv = slurp(dir.path / "trajectories.csv");
    CHECK(count_lines(csv) == 1 + 3 * 4 * 10);
    CHECK(csv.rfind("realization,kappa,gamma,energy,width,slope\n", 0) == 0);
}

TEST_CASE("ep map emits density with axes metadata") {
    TempDir dir("epmap");
    REQUIRE(run_cli("ep-map --model ho --d 4 --n 1 --nr 4 --bins 16 --seed 3 -o " +
                    dir.str()) == 0);
    CHECK(fs::exists(dir.path / "eps.csv"));
    const std::string density = slurp(dir.path / "density.csv");
    CHECK(count_lines(density) == 16);
    const std::string axes = slurp(dir.path / "density.json");
    CHECK(axes.find("\"re_bins\": 16") != std::string::npos);
}

TEST_SUITE_END();
