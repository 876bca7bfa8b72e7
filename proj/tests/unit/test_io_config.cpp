#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fpflux/config.hpp"
#include "fpflux/io.hpp"

using namespace fpflux;

TEST(Config, ParsesSectionsAndLists) {
    Config c = Config::parse("# header\n[flux]\nbeta = 5\ntimes = 0.5, 1, 2\nimag = true\n\n[potential]\nkind = double-well-1d\n");
    EXPECT_DOUBLE_EQ(c.get_double("flux", "beta", 0), 5.0);
    EXPECT_EQ(c.get_doubles("flux", "times", {}), (std::vector<double>{0.5, 1, 2}));
    EXPECT_TRUE(c.get_bool("flux", "imag", false));
    EXPECT_EQ(c.get_string("potential", "kind", ""), "double-well-1d");
    EXPECT_EQ(c.get_long("flux", "shots", 17), 17);
    EXPECT_TRUE(c.has("flux", "beta"));
    EXPECT_FALSE(c.has("flux", "shots"));
}

TEST(Config, ErrorsCarryLineNumbers) {
    try {
        Config::parse("[flux]\nbeta = 5\nthis line has no equals\n", "x.cfg");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("x.cfg:3"), std::string::npos) << e.what();
    }
    Config c = Config::parse("[flux]\nbeta = five\n", "y.cfg");
    try {
        c.get_double("flux", "beta", 0);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("y.cfg:2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
    }
}

TEST(Config, UnknownKeysAndSectionsRejected) {
    Config c = Config::parse("[flux]\nbeta = 5\nbogus = 1\n", "z.cfg");
    EXPECT_THROW(c.restrict_to({{"flux", {"beta"}}}), ConfigError);
    EXPECT_NO_THROW(c.restrict_to({{"flux", {"beta", "bogus"}}}));
    Config d = Config::parse("[nowhere]\nx = 1\n");
    EXPECT_THROW(d.restrict_to({{"flux", {"beta"}}}), ConfigError);
    EXPECT_THROW(Config::parse("[flux]\nbeta = 1\nbeta = 2\n"), ConfigError);
}

TEST(Config, CanonicalFormIsOrderIndependent) {
    Config a = Config::parse("[b]\ny = 2\nx = 1\n[a]\nz = 3\n");
    Config b = Config::parse("[a]\nz = 3\n[b]\nx = 1\ny = 2\n");
    EXPECT_EQ(a.canonical(), b.canonical());
    Config c = Config::parse(a.canonical());
    EXPECT_EQ(c.canonical(), a.canonical());
}

TEST(Io, CsvQuoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
    CsvTable t({"name", "value"});
    t.row({"x,y", "1"}).row_values({2.5, -1});
    EXPECT_EQ(t.str(), "name,value\r\n\"x,y\",1\r\n2.5,-1\r\n");
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_THROW(t.row({"only one"}), Error);
}

TEST(Io, DoublesRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Io, AtomicWriteReplacesContent) {
    auto dir = std::filesystem::temp_directory_path() / "fpflux_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    atomic_write(path, "first");
    atomic_write(path, "second");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "second");
    int files = 0;
    for (const auto &e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
    EXPECT_EQ(files, 1);
    std::filesystem::remove_all(dir);
}

TEST(Io, MatrixMarketRoundTrip) {
    Mat m(3, 2);
    m << 1, 0, -2.5, 1e-17, 0, 3;
    Mat back = parse_matrix_market_real(matrix_market(m));
    EXPECT_EQ(back, m);
    EXPECT_EQ(parse_matrix_market_real(matrix_market(m, 1e-12))(1, 1), 0.0);
}
