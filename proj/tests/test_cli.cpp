#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path make_temp_dir() {
    std::string tmpl = (fs::temp_directory_path() / "sentistock_cli_XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    return tmpl;
}

CliResult run_cli(const std::string& args) {
    const fs::path dir = make_temp_dir();
    const fs::path out_file = dir / "stdout";
    const fs::path err_file = dir / "stderr";
    const std::string cmd = std::string(SENTISTOCK_BIN) + " " + args + " >" +
                            out_file.string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    fs::remove_all(dir);
    return result;
}

const std::string kSampleConfig =
    std::string(SENTISTOCK_SOURCE_DIR) + "/configs/sample.conf";

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("running without a config is a usage error") {
    const CliResult res = run_cli("");
    CHECK(res.code == 2);
    CHECK(res.err.find("--config") != std::string::npos);
}

TEST_CASE("help exits cleanly and documents the flags") {
    const CliResult res = run_cli("--help");
    CHECK(res.code == 0);
    for (const char* flag : {"--config", "--seed", "--out", "--stage", "--format"})
        CHECK(res.out.find(flag) != std::string::npos);
}

TEST_CASE("unknown flags, stages, and formats are usage errors") {
    CHECK(run_cli("--config " + kSampleConfig + " --frobnicate").code == 2);

    const CliResult stage = run_cli("--config " + kSampleConfig + " --stage bogus");
    CHECK(stage.code == 2);
    CHECK(stage.err.find("unknown stage 'bogus'") != std::string::npos);
    CHECK(stage.err.find("ingest") != std::string::npos);  // lists the valid names

    const CliResult format = run_cli("--config " + kSampleConfig + " --format xml");
    CHECK(format.code == 2);
    CHECK(format.err.find("--format") != std::string::npos);
}

TEST_CASE("a missing config file is a config error naming the path") {
    const CliResult res = run_cli("--config /no/such/run.conf");
    CHECK(res.code == 2);
    CHECK(res.err.find("/no/such/run.conf") != std::string::npos);
}

TEST_CASE("a config pointing at a missing stock file fails validation") {
    const fs::path dir = make_temp_dir();
    const std::string src(SENTISTOCK_SOURCE_DIR);
    std::ofstream conf(dir / "bad.conf");
    conf << "[run]\nseed = 1\nout_dir = " << (dir / "out").string() << "\n"
         << "[grid]\nwindows = 0\n"
         << "[market:ghost]\naliases = ghost\n"
         << "news = " << src << "/testdata/tesla_news.jsonl\n"
         << "stock = " << (dir / "missing_stock.csv").string() << "\n"
         << "[assets]\nstopwords = " << src << "/data/stopwords.txt\n"
         << "tagger_lexicon = " << src << "/data/tagger_lexicon.tsv\n"
         << "irregular_lemmas = " << src << "/data/irregular_lemmas.tsv\n"
         << "[lexicon]\npositive = " << src << "/data/lexicon/positive-words.txt\n"
         << "negative = " << src << "/data/lexicon/negative-words.txt\n";
    conf.close();

    const CliResult res = run_cli("--config " + (dir / "bad.conf").string());
    CHECK(res.code == 2);
    CHECK(res.err.find("missing_stock.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("a full run writes reports and prints the text rendering") {
    const fs::path out = make_temp_dir();
    const CliResult res =
        run_cli("--config " + kSampleConfig + " --out " + out.string());
    REQUIRE(res.code == 0);
    CHECK(res.err.empty());
    CHECK(res.out.find("Correlation report") != std::string::npos);

    CHECK(fs::exists(out / "report.txt"));
    REQUIRE(fs::exists(out / "report.csv"));
    const std::string csv = slurp(out / "report.csv");
    CHECK(csv.rfind("task,window,direction,market,model,correlation,n_test\n", 0) == 0);
    // 2 markets x 2 windows x 2 directions x 2 tasks x 5 models + header.
    CHECK(line_count(csv) == 81);

    // Intermediate artifacts exist for both configured markets.
    for (const char* market : {"nkorea", "tesla"}) {
        const std::string m(market);
        CHECK(fs::exists(out / (m + "_articles.jsonl")));
        CHECK(fs::exists(out / (m + "_stock.csv")));
        CHECK(fs::exists(out / (m + "_selected.jsonl")));
        CHECK(fs::exists(out / (m + "_terms.csv")));
        CHECK(fs::exists(out / (m + "_series.csv")));
    }
    CHECK(!fs::is_empty(out / "datasets"));
    CHECK(!fs::is_empty(out / "models"));
    fs::remove_all(out);
}

TEST_CASE("identical runs are byte-identical; a different seed is not") {
    const fs::path a = make_temp_dir(), b = make_temp_dir(), c = make_temp_dir();
    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + a.string()).code == 0);
    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + b.string()).code == 0);
    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + c.string() + " --seed 8812")
                .code == 0);

    const std::string csv_a = slurp(a / "report.csv");
    CHECK(csv_a == slurp(b / "report.csv"));
    CHECK(csv_a != slurp(c / "report.csv"));
    CHECK(slurp(a / "report.txt") == slurp(b / "report.txt"));
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("stage-by-stage execution reproduces the monolithic run") {
    const fs::path whole = make_temp_dir(), staged = make_temp_dir();
    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + whole.string()).code == 0);

    for (const char* stage :
         {"ingest", "prep", "features", "sentiment", "dataset", "train", "report"}) {
        const CliResult res = run_cli("--config " + kSampleConfig + " --out " +
                                      staged.string() + " --stage " + stage);
        CAPTURE(stage);
        REQUIRE(res.code == 0);
    }
    CHECK(slurp(staged / "report.csv") == slurp(whole / "report.csv"));
    CHECK(slurp(staged / "report.txt") == slurp(whole / "report.txt"));

    SUBCASE("the report stage prints the requested format to stdout") {
        const CliResult csv = run_cli("--config " + kSampleConfig + " --out " +
                                      staged.string() + " --stage report --format csv");
        REQUIRE(csv.code == 0);
        CHECK(csv.out == slurp(staged / "report.csv"));
        const CliResult text = run_cli("--config " + kSampleConfig + " --out " +
                                       staged.string() + " --stage report");
        REQUIRE(text.code == 0);
        CHECK(text.out == slurp(staged / "report.txt"));
    }
    fs::remove_all(whole);
    fs::remove_all(staged);
}

TEST_CASE("a stage run out of order is a pipeline error naming the stage") {
    const fs::path out = make_temp_dir();
    const CliResult res = run_cli("--config " + kSampleConfig + " --out " + out.string() +
                                  " --stage train");
    CHECK(res.code == 1);
    CHECK(res.err.find("stage train failed") != std::string::npos);
    CHECK(res.err.find("dataset") != std::string::npos);  // tells the user what to run
    fs::remove_all(out);
}

TEST_CASE("the synth stage emits a standalone series") {
    const fs::path a = make_temp_dir(), b = make_temp_dir(), c = make_temp_dir();
    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + a.string() + " --stage synth")
                .code == 0);
    REQUIRE(fs::exists(a / "synthetic_series.csv"));
    REQUIRE(fs::exists(a / "synthetic_plot.csv"));
    CHECK(slurp(a / "synthetic_series.csv")
              .rfind("date,stock_raw,stock_rate,stock_norm,sent_raw,", 0) == 0);

    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + b.string() + " --stage synth")
                .code == 0);
    CHECK(slurp(a / "synthetic_series.csv") == slurp(b / "synthetic_series.csv"));

    REQUIRE(run_cli("--config " + kSampleConfig + " --out " + c.string() +
                    " --stage synth --seed 4242")
                .code == 0);
    CHECK(slurp(a / "synthetic_series.csv") != slurp(c / "synthetic_series.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}
