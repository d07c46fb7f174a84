#include <gtest/gtest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::filesystem::path scratch() {
    auto dir = std::filesystem::temp_directory_path() / ("sigmak_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

Run run(const std::string& args) {
    const auto err_path = scratch() / "stderr.txt";
    const std::string cmd = std::string(SIGMAK_CLI_PATH) + " " + args + " 2>" + err_path.string();
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err(err_path);
    r.err.assign(std::istreambuf_iterator<char>(err), {});
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

// rows of one CSV table (header excluded)
std::vector<std::string> table_rows(const std::string& out, const std::string& table) {
    std::vector<std::string> rows;
    bool in = false, header = false;
    for (const auto& l : lines(out)) {
        if (l.rfind("# table=", 0) == 0) {
            in = l == "# table=" + table;
            header = in;
            continue;
        }
        if (!in || l.rfind("#", 0) == 0) continue;
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(l);
    }
    return rows;
}

}  // namespace

TEST(Cli, SearchPublishedList) {
    const auto r = run("search --k 2 --limit 12035 --threads 1");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_GE(ls.size(), 3u);
    EXPECT_EQ(ls[0].rfind("# sigmak", 0), 0u);
    EXPECT_NE(ls[0].find("version=1.0.0"), std::string::npos);
    EXPECT_NE(ls[0].find("seed=0"), std::string::npos);
    EXPECT_NE(ls[0].find("limit=12035"), std::string::npos);
    const auto rows = table_rows(r.out, "solution");
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[0], "5,2,6,12");
    EXPECT_EQ(rows[7].substr(0, 6), "12035,");
}

TEST(Cli, SearchAnnotate) {
    const auto r = run("search --k 2 --limit 200 --annotate");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = table_rows(r.out, "solution");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "5,2,6,12,12,true,true,true,false,true,true,true,decided,true");
    EXPECT_EQ(rows[1].substr(0, 18), "125,2,156,312,312,");
}

TEST(Cli, JsonLines) {
    const auto r = run("search --k 3 --limit 11219 --format jsonl");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 5u);
    const auto meta = nlohmann::json::parse(ls[0]);
    EXPECT_EQ(meta["type"], "meta");
    EXPECT_EQ(meta["version"], "1.0.0");
    EXPECT_EQ(meta["seed"], 0);
    EXPECT_EQ(meta["flags"]["k"], "3");
    const auto last = nlohmann::json::parse(ls[4]);
    EXPECT_EQ(last["type"], "solution");
    EXPECT_EQ(last["n"], 11219);
    EXPECT_EQ(last["sigma_n1"], 3 * last["sigma_n"].get<unsigned long>());
}

TEST(Cli, PeriodCheck) {
    const auto r = run("period-check --y 5 --r 2");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = table_rows(r.out, "period_equivalence");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0], "5,2,900,true,100,100");
}

TEST(Cli, ScheduleClamped) {
    const auto r = run("schedule --x 1000000");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = table_rows(r.out, "schedule");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NE(rows[0].find(",true,0,"), std::string::npos) << rows[0];
    EXPECT_EQ(rows[0].rfind("1000000,13.815510557964274,1,5,0.015384615384615385,true,0,", 0), 0u) << rows[0];
}

TEST(Cli, ByteIdenticalReruns) {
    for (const std::string args : {"model --y 7 --r 2 --mc 20000 --seed 9 --threads 2",
                                   "error-sets --x 5000 --y 7 --r 3 --eps 0.01 --k 2 --verify-inclusion",
                                   "density --k 2 --points 100,1000,10000 --format jsonl"}) {
        const auto a = run(args), b = run(args);
        EXPECT_EQ(a.code, 0) << args << a.err;
        EXPECT_EQ(a.out, b.out) << args;
        EXPECT_FALSE(a.out.empty());
    }
    const auto t = run("schedule --x 1000 --timestamp");
    EXPECT_NE(lines(t.out)[0].find("unix_time="), std::string::npos);
    EXPECT_EQ(run("schedule --x 1000").out.find("unix_time="), std::string::npos);
}

TEST(Cli, ThreadCountDoesNotChangeData) {
    const auto a = run("search --k 2 --limit 300000 --threads 1");
    const auto b = run("search --k 2 --limit 300000 --threads 3");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(table_rows(a.out, "solution"), table_rows(b.out, "solution"));
}

TEST(Cli, ModelTables) {
    const auto r = run("model --y 13 --r 1 --exact --eps 0.005 --k 2");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_FALSE(table_rows(r.out, "pmf_atom").empty());
    EXPECT_EQ(table_rows(r.out, "concentration").size(), 3u);
    const auto lemma = table_rows(r.out, "lemma_check");
    ASSERT_EQ(lemma.size(), 4u);
    for (const auto& l : lemma) EXPECT_NE(l.find(",true"), std::string::npos);
    const auto petrov = table_rows(r.out, "petrov_report");
    ASSERT_EQ(petrov.size(), 1u);
    EXPECT_NE(petrov[0].find("5 7 11 13"), std::string::npos);
}

TEST(Cli, ClassifyCertificate) {
    const auto r = run("classify --n 120 --k 3 --format jsonl");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = nlohmann::json::parse(lines(r.out).at(1));
    EXPECT_EQ(row["type"], "classifier_verdict");
    EXPECT_EQ(row["k_layered"], true);
    EXPECT_EQ(row["sigma"], "360");
    EXPECT_EQ(row["certificate"]["parts"].size(), 3u);
    const auto five = run("classify --n 5");
    EXPECT_EQ(five.code, 0);
    EXPECT_NE(table_rows(five.out, "classifier_verdict")[0].find("5,2,6,false,false"), std::string::npos);
}

TEST(Cli, SchinzelAndPrimes) {
    const auto s = run("schinzel --x-limit 100");
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(table_rows(s.out, "family_hit").size(), 3u);
    const auto fd = table_rows(s.out, "fixed_divisor_report");
    ASSERT_EQ(fd.size(), 1u);
    EXPECT_EQ(fd[0], "2 3 5 7,,4550975,25459540,5,4550025,25459480");
    const auto t = run("primes --theta-check 100000");
    EXPECT_EQ(t.code, 0) << t.err;
    const auto m = run("primes --mertens 1000");
    EXPECT_EQ(m.code, 0);
    EXPECT_EQ(table_rows(m.out, "mertens_report").size(), 1u);
}

TEST(Cli, OutputFileAndConfig) {
    const auto dir = scratch();
    const auto cfg = dir / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# defaults\nk = 3\nlimit=11219\nformat=jsonl\n";
    }
    const auto out = dir / "out.jsonl";
    const auto r = run("search --config " + cfg.string() + " --output " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(out);
    const std::string data((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(lines(data).size(), 5u);
    // command-line flags override the file
    const auto over = run("search --config " + cfg.string() + " --limit 2000 --format csv");
    EXPECT_EQ(table_rows(over.out, "solution").size(), 2u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("search --k 2").code, 2);
    EXPECT_EQ(run("search --k 2 --limit 10 --threads zero").code, 2);
    EXPECT_EQ(run("search --k 0 --limit 10").code, 2);
    EXPECT_EQ(run("period-check --y 13 --r 3").code, 3);
    EXPECT_EQ(run("search --k 2 --limit 20000000000").code, 3);
    EXPECT_EQ(run("model --y 7 --r 1 --eps 0.1 --k 2").code, 2);  // no effective primes
    const auto bad = run("primes --theta-check 100 --mertens 100");
    EXPECT_EQ(bad.code, 2);
    EXPECT_FALSE(bad.err.empty());
    EXPECT_EQ(run("--help").code, 0);
}
