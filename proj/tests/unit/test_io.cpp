#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <thread>

#include "ocq/error.hpp"
#include "ocq/io/cache.hpp"
#include "ocq/io/csv.hpp"
#include "ocq/io/digest.hpp"
#include "ocq/io/manifest.hpp"
#include "ocq/io/scenario.hpp"

namespace fs = std::filesystem;
using ocq::io::parse_scenario;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ocq_io_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Digest, KnownVector) {
    EXPECT_EQ(ocq::io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Digest, ShortestRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, std::numbers::pi, -2.5e-300, 0.0, 1e21}) {
        EXPECT_EQ(std::stod(ocq::io::format_double(x)), x);
    }
    EXPECT_EQ(ocq::io::format_double(0.5), "0.5");
}

TEST(ScenarioParse, ExpressionsAndDefaults) {
    const auto sc = parse_scenario(
        "# demo\n"
        "particles = 20\n"
        "kappa = 100   # strong\n"
        "t_max = 4*pi\n"
        "dt = pi/256\n"
        "phases = 0, pi/2, pi, 3*pi/2\n"
        "sweep = 3..6\n");
    EXPECT_EQ(sc.particles, 20u);
    EXPECT_DOUBLE_EQ(sc.kappa, 100.0);
    EXPECT_DOUBLE_EQ(sc.t_max, 4.0 * std::numbers::pi);
    EXPECT_DOUBLE_EQ(sc.dt, std::numbers::pi / 256.0);
    ASSERT_EQ(sc.phases.size(), 4u);
    EXPECT_DOUBLE_EQ(sc.phases[3], 1.5 * std::numbers::pi);
    EXPECT_EQ(sc.sweep, (std::vector<std::size_t>{3, 4, 5, 6}));
    EXPECT_EQ(sc.modes, 4096u);
    EXPECT_NO_THROW(sc.validate());
}

TEST(ScenarioParse, RealExpressions) {
    using ocq::io::parse_real_expression;
    EXPECT_DOUBLE_EQ(parse_real_expression("-pi"), -std::numbers::pi);
    EXPECT_DOUBLE_EQ(parse_real_expression("1e-3"), 1e-3);
    EXPECT_DOUBLE_EQ(parse_real_expression("1023*pi/256"), 1023.0 * std::numbers::pi / 256.0);
    EXPECT_THROW((void)parse_real_expression("pie"), ocq::UsageError);
    EXPECT_THROW((void)parse_real_expression("2**pi"), ocq::UsageError);
    EXPECT_THROW((void)parse_real_expression(""), ocq::UsageError);
}

TEST(ScenarioParse, ErrorsNameTheField) {
    auto message = [](std::string_view text) {
        try {
            auto sc = parse_scenario(text);
            sc.validate();
        } catch (const ocq::UsageError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("colour = red\n").find("colour"), std::string::npos);
    EXPECT_NE(message("kappa = 1\nkappa = 2\n").find("repeats"), std::string::npos);
    EXPECT_NE(message("kappa\n").find("key = value"), std::string::npos);
    EXPECT_NE(message("particles = 600\n").find("'modes'"), std::string::npos);
    EXPECT_NE(message("t_max = 1\ndt = 0.3\n").find("'dt'"), std::string::npos);
    EXPECT_NE(message("kappa = nan\n").find("kappa"), std::string::npos);
    EXPECT_NE(message("shots = 0\n").find("'shots'"), std::string::npos);
    EXPECT_NE(message("particles = -3\n").find("particles"), std::string::npos);
    EXPECT_NE(message("window = hann\n").find("window"), std::string::npos);
    EXPECT_NE(message("sweep = 1..600\n").find("'sweep'"), std::string::npos);
}

TEST(ScenarioHash, StableAndSensitive) {
    const auto a = parse_scenario("kappa = 100\nt_max = 4*pi\n");
    const auto b = parse_scenario("t_max=12.566370614359172\n\n  kappa=1e2 # same\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 64u);
    auto c = a;
    c.seed = 1;
    EXPECT_NE(a.hash(), c.hash());
    c = a;
    c.kappa = std::nextafter(100.0, 200.0);
    EXPECT_NE(a.hash(), c.hash());
}

TEST(Csv, RoundTripWithMetadata) {
    const auto dir = scratch("csv");
    ocq::io::CsvWriter w(dir / "t.csv", "abc123", {{"kappa", "100"}}, {"x", "y"});
    w.row({0.1, -1.0 / 3.0});
    w.row(std::vector<double>{1e-300, 42.0});
    w.close();
    const auto text = slurp(dir / "t.csv");
    EXPECT_EQ(text.rfind("# scenario_hash: abc123\n", 0), 0u);
    const auto table = ocq::io::read_csv(dir / "t.csv");
    EXPECT_EQ(table.columns, (std::vector<std::string>{"x", "y"}));
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0][1], -1.0 / 3.0);
    EXPECT_EQ(table.rows[1][0], 1e-300);
    EXPECT_EQ(table.metadata.at(1).second, "100");
    EXPECT_THROW(w.row({1.0}), std::exception);
}

TEST(Csv, RowWidthChecked) {
    const auto dir = scratch("csvw");
    ocq::io::CsvWriter w(dir / "t.csv", "h", {}, {"a", "b"});
    EXPECT_THROW(w.row({1.0, 2.0, 3.0}), std::logic_error);
}

class CacheTest : public ::testing::Test {
protected:
    void SetUp() override { dir_ = scratch("cache"); }
    fs::path dir_;
    ocq::ImpurityPotential pot_{50.0, 0.0, 0.0};
};

TEST_F(CacheTest, ExactRoundTrip) {
    const ocq::io::SpectrumCache cache(dir_);
    bool hit = true;
    const auto first = cache.get_or_compute(pot_, 256, {}, &hit);
    EXPECT_FALSE(hit);
    const auto second = cache.get_or_compute(pot_, 256, {}, &hit);
    EXPECT_TRUE(hit);
    EXPECT_TRUE((first.energies.array() == second.energies.array()).all());
    EXPECT_TRUE((first.overlaps.array() == second.overlaps.array()).all());
    EXPECT_EQ(first.coupled, second.coupled);
    EXPECT_EQ(first.effective_strength, second.effective_strength);
}

TEST_F(CacheTest, KeyCoversInputs) {
    using ocq::io::SpectrumCache;
    const auto k = SpectrumCache::key(pot_, 256, {});
    EXPECT_NE(k, SpectrumCache::key(pot_, 512, {}));
    EXPECT_NE(k, SpectrumCache::key({50.0, 0.1, 0.0}, 256, {}));
    EXPECT_NE(k, SpectrumCache::key({50.0, 0.0, 0.2}, 256, {}));
    EXPECT_NE(k, SpectrumCache::key({51.0, 0.0, 0.0}, 256, {}));
    EXPECT_NE(k, SpectrumCache::key(pot_, 256, {}, "ocq-solver-next"));
    ocq::SolverOptions bare;
    bare.coupling = ocq::CouplingScheme::bare;
    EXPECT_NE(k, SpectrumCache::key(pot_, 256, bare));
}

TEST_F(CacheTest, VersionBumpMisses) {
    const ocq::io::SpectrumCache cache(dir_);
    const auto spec = ocq::diagonalize_perturbed(ocq::OscillatorBasis(128), pot_);
    cache.store(ocq::io::SpectrumCache::key(pot_, 128, {}, "old"), spec);
    EXPECT_TRUE(cache.load(ocq::io::SpectrumCache::key(pot_, 128, {}, "old")).has_value());
    EXPECT_FALSE(cache.load(ocq::io::SpectrumCache::key(pot_, 128, {})).has_value());
}

TEST_F(CacheTest, CorruptionIsAMiss) {
    const ocq::io::SpectrumCache cache(dir_);
    (void)cache.get_or_compute(pot_, 128);
    const auto key = ocq::io::SpectrumCache::key(pot_, 128, {});
    const auto path = cache.entry_path(key);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(200);
        f.put('\x7f');
    }
    EXPECT_FALSE(cache.load(key).has_value());
    fs::resize_file(path, 100);
    EXPECT_FALSE(cache.load(key).has_value());
    bool hit = true;
    (void)cache.get_or_compute(pot_, 128, {}, &hit);
    EXPECT_FALSE(hit);
    EXPECT_TRUE(cache.load(key).has_value());
}

TEST_F(CacheTest, ConcurrentReadersAgree) {
    const ocq::io::SpectrumCache cache(dir_);
    const auto reference = cache.get_or_compute(pot_, 512);
    const auto key = ocq::io::SpectrumCache::key(pot_, 512, {});
    std::vector<std::future<bool>> readers;
    for (int r = 0; r < 8; ++r) {
        readers.push_back(std::async(std::launch::async, [&] {
            for (int i = 0; i < 5; ++i) {
                const auto s = cache.load(key);
                if (!s || !(s->overlaps.array() == reference.overlaps.array()).all()) return false;
            }
            return true;
        }));
    }
    for (auto& f : readers) EXPECT_TRUE(f.get());
}

TEST_F(CacheTest, DirectoryFromEnvironment) {
    ::setenv(ocq::io::kCacheEnvVar, dir_.c_str(), 1);
    EXPECT_EQ(ocq::io::SpectrumCache::default_directory(), dir_);
    ::unsetenv(ocq::io::kCacheEnvVar);
    EXPECT_NE(ocq::io::SpectrumCache::default_directory(), dir_);
}

TEST(Manifest, ListsFilesWithDigests) {
    const auto dir = scratch("manifest");
    std::ofstream(dir / "a.csv") << "1,2\n";
    ocq::io::RunManifest m;
    m.command = "dynamics";
    m.scenario_hash = "h";
    m.add_file(dir, dir / "a.csv");
    m.diagnostics["k_doubling_delta_nu"] = 1e-7;
    m.write(dir / "manifest.json");
    const auto text = slurp(dir / "manifest.json");
    EXPECT_NE(text.find("\"a.csv\""), std::string::npos);
    EXPECT_NE(text.find(ocq::io::sha256_hex("1,2\n")), std::string::npos);
    EXPECT_NE(text.find("k_doubling_delta_nu"), std::string::npos);
}
