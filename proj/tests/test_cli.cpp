#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftstream/cli.hpp"
#include "driftstream/core.hpp"
#include "driftstream/streams.hpp"

using namespace driftstream;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_blob_csv(const fs::path& dir, int rows = 200) {
    SeededRng rng(77);
    const fs::path path = dir / "blobs.csv";
    std::ofstream out(path);
    out << "x,y,label\n";
    for (int i = 0; i < rows; ++i) {
        const bool abnormal = i % 2 == 1;  // interleaved so any prefix is mixed
        const double cx = abnormal ? 10.0 : 0.0;
        out << format_double(cx + rng.uniform()) << ',' << format_double(rng.uniform()) << ','
            << (abnormal ? "abnormal" : "normal") << '\n';
    }
    return path;
}

}  // namespace

TEST_CASE("sample subcommand writes the contracted row count plus metadata") {
    const auto dir = scratch_dir("ds_cli_sample");
    const auto csv = write_blob_csv(dir);
    const auto out = dir / "sampled.csv";
    const int rc = cli::run({"sample", "--input", csv.string(), "--label", "label",
                             "--fraction", "0.05", "--k", "2", "--seed", "1", "--out",
                             out.string()});
    REQUIRE(rc == 0);
    const CsvData sampled = read_labeled_csv(out, "label");
    CHECK(sampled.records.size() == 10);  // llround(0.05 * 200)
    CHECK(fs::exists(out.string() + ".meta.json"));
    const std::string meta = slurp(out.string() + ".meta.json");
    CHECK(meta.find("\"rows_out\": 10") != std::string::npos);
    CHECK(meta.find("cluster_sizes") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sample requires --label") {
    const int rc = cli::run({"sample", "--input", "whatever.csv"});
    CHECK(rc == 1);
}

TEST_CASE("sample rejects --fraction 0") {
    const auto dir = scratch_dir("ds_cli_frac");
    const auto csv = write_blob_csv(dir);
    const int rc = cli::run({"sample", "--input", csv.string(), "--label", "label",
                             "--fraction", "0", "--out", (dir / "o.csv").string()});
    CHECK(rc == 1);
    fs::remove_all(dir);
}

TEST_CASE("missing input file maps to the data-error exit code") {
    const int rc = cli::run({"sample", "--input", "/nonexistent/x.csv", "--label", "label",
                             "--out", "/tmp/ds_unused.csv"});
    CHECK(rc == 2);
}

TEST_CASE("unknown model name is a usage error") {
    const int rc = cli::run({"compare", "--synth", "abrupt", "--length", "300", "--position",
                             "150", "--models", "pwpae,bogus", "--out", "/tmp/ds_unused_dir"});
    CHECK(rc == 1);
}

TEST_CASE("synth validates drift geometry") {
    const int rc = cli::run({"synth", "--kind", "gradual", "--length", "100", "--position",
                             "90", "--width", "50", "--out", "/tmp/ds_unused2.csv"});
    CHECK(rc == 1);
}

TEST_CASE("synth runs are byte-identical for equal flags") {
    const auto dir = scratch_dir("ds_cli_synth");
    const auto out1 = dir / "a.csv";
    const auto out2 = dir / "b.csv";
    const std::vector<std::string> base = {"synth",      "--kind",   "gradual", "--length",
                                           "2000",       "--position", "800",   "--width",
                                           "300",        "--noise",  "0.1",     "--features",
                                           "4",          "--seed",   "17"};
    auto args1 = base;
    args1.insert(args1.end(), {"--out", out1.string()});
    auto args2 = base;
    args2.insert(args2.end(), {"--out", out2.string()});
    REQUIRE(cli::run(args1) == 0);
    REQUIRE(cli::run(args2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(out1.string() + ".meta.json") == slurp(out2.string() + ".meta.json"));
    CHECK(slurp(out1).substr(0, 20) == "f1,f2,f3,f4,label\n0.");
    fs::remove_all(dir);
}

TEST_CASE("compare writes aligned curves for every model") {
    const auto dir = scratch_dir("ds_cli_compare");
    const int rc = cli::run({"compare", "--synth", "abrupt", "--length", "1200", "--position",
                             "600", "--features", "4", "--models", "ht,efdt", "--seed", "5",
                             "--out", dir.string()});
    REQUIRE(rc == 0);
    const std::string ht_curve = slurp(dir / "curve_ht.csv");
    const std::string efdt_curve = slurp(dir / "curve_efdt.csv");

    auto first_column = [](const std::string& csv) {
        std::vector<std::string> indices;
        std::istringstream in(csv);
        std::string line;
        while (std::getline(in, line))
            indices.push_back(line.substr(0, line.find(',')));
        return indices;
    };
    CHECK(first_column(ht_curve) == first_column(efdt_curve));

    const std::string results = slurp(dir / "results.csv");
    CHECK(results.rfind("model,accuracy,precision,recall,f1,avg_test_time_ms\n", 0) == 0);
    CHECK(results.find("\nht,") != std::string::npos);
    CHECK(results.find("\nefdt,") != std::string::npos);
    CHECK(fs::exists(dir / "run_meta.json"));
    fs::remove_all(dir);
}

TEST_CASE("compare on a csv input reaches sensible accuracy") {
    const auto dir = scratch_dir("ds_cli_csv_compare");
    const auto csv = write_blob_csv(dir, 600);
    const int rc = cli::run({"compare", "--input", csv.string(), "--label", "label",
                             "--models", "ht", "--train-fraction", "0.2", "--seed", "3",
                             "--out", (dir / "runs").string()});
    REQUIRE(rc == 0);
    const std::string results = slurp(dir / "runs" / "results.csv");
    // the two blobs are trivially separable once the tree splits
    std::istringstream in(results);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    const auto comma = row.find(',');
    REQUIRE(row.substr(0, comma) == "ht");
    CHECK(std::stod(row.substr(comma + 1)) >= 0.9);
    fs::remove_all(dir);
}

TEST_CASE("compare emits the pwpae weight trace") {
    const auto dir = scratch_dir("ds_cli_pwpae");
    const int rc = cli::run({"compare", "--synth", "abrupt", "--length", "600", "--position",
                             "300", "--features", "4", "--models", "pwpae", "--members", "3",
                             "--seed", "5", "--out", dir.string()});
    REQUIRE(rc == 0);
    const std::string trace = slurp(dir / "pwpae_weights.csv");
    CHECK(trace.rfind("instance_index,err_arf-adwin,w_arf-adwin,err_arf-ddm,w_arf-ddm,"
                      "err_srp-adwin,w_srp-adwin,err_srp-ddm,w_srp-ddm\n",
                      0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') > 2);
    fs::remove_all(dir);
}

TEST_CASE("compare needs exactly one input source") {
    CHECK(cli::run({"compare", "--models", "ht", "--out", "/tmp/ds_unused3"}) == 1);
    CHECK(cli::run({"compare", "--input", "a.csv", "--label", "l", "--synth", "abrupt",
                    "--out", "/tmp/ds_unused4"}) == 1);
}
