#include <fstream>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "qcomp/config.hpp"

using namespace qcomp;
using Catch::Matchers::ContainsSubstring;

namespace {

ExperimentSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

const char* kMinimal = "n_cells = 2\nn_users_per_cell = 1\nn_antennas = 4\n";

}  // namespace

TEST_CASE("defaults come from the simulation setup") {
    const ExperimentSpec s = parse(kMinimal);
    CHECK(s.network.inter_bs_distance_m == 2000.0);
    CHECK(s.network.min_bs_user_distance_m == 100.0);
    CHECK(s.network.shadowing_std_db == 8.7);
    CHECK(s.network.noise_figure_db == 5.0);
    CHECK(s.network.carrier_freq_hz == 2.4e9);
    CHECK(s.network.bandwidth_hz == 10e6);
    CHECK(s.preset == Preset::SingleRun);
    CHECK(s.n_realizations == 1);
}

TEST_CASE("lists, scalars and comments") {
    const ExperimentSpec s = parse(std::string(kMinimal) +
                                   "# a comment\n"
                                   "target_sinr_db = [-3, 2]   # two points\n"
                                   "bits = [2, 3, inf]\n"
                                   "n_realizations = 20\n"
                                   "\n"
                                   "preset = max_power_vs_sinr\n");
    REQUIRE(s.target_sinr_db.size() == 2);
    CHECK(s.target_sinr_db[0] == -3.0);
    CHECK(s.target_sinr_db[1] == 2.0);
    REQUIRE(s.bits.size() == 3);
    CHECK(s.bits[2].is_infinite());
    CHECK(s.n_realizations == 20);
    CHECK(s.preset == Preset::MaxPowerVsSinr);

    const ExperimentSpec scalar = parse(std::string(kMinimal) + "target_sinr_db = 2\nbits = 3\n");
    CHECK(scalar.target_sinr_db == std::vector<double>{2.0});
    CHECK(scalar.bits == std::vector<Bits>{Bits::of(3)});
}

TEST_CASE("missing required keys are named") {
    CHECK_THROWS_WITH(parse("n_cells = 2\nn_users_per_cell = 1\n"), ContainsSubstring("n_antennas"));
    CHECK_THROWS_WITH(parse("n_antennas = 2\nn_users_per_cell = 1\n"), ContainsSubstring("n_cells"));
}

TEST_CASE("bad input reports the line") {
    CHECK_THROWS_WITH(parse(std::string(kMinimal) + "n_antenas = 4\n"),
                      ContainsSubstring("line 4") && ContainsSubstring("unknown key 'n_antenas'"));
    CHECK_THROWS_WITH(parse(std::string(kMinimal) + "n_cells = 3\n"), ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(parse(std::string(kMinimal) + "seed = abc\n"), ContainsSubstring("line 4"));
    CHECK_THROWS_WITH(parse(std::string(kMinimal) + "bits = [2, 0]\n"), ContainsSubstring("bits"));
    CHECK_THROWS_WITH(parse(std::string(kMinimal) + "trace_scope = global\n"), ContainsSubstring("per_cell"));
    CHECK_THROWS_WITH(parse(std::string(kMinimal) + "bits = [2, 3\n"), ContainsSubstring("unterminated"));
    CHECK_THROWS_WITH(parse("just words\n"), ContainsSubstring("line 1"));
    CHECK_THROWS_AS(parse(std::string(kMinimal) + "gap_tol =\n"), ConfigError);
}

TEST_CASE("validation catches out-of-range values") {
    ExperimentSpec s = parse(kMinimal);
    CHECK_NOTHROW(validate(s));
    s.n_realizations = 0;
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("n_realizations"));
    s = parse(std::string(kMinimal) + "outer_tol = 0\n");
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("outer_tol"));
    s = parse("n_cells = 0\nn_users_per_cell = 1\nn_antennas = 4\n");
    CHECK_THROWS_WITH(validate(s), ContainsSubstring("n_cells"));
}

TEST_CASE("every preset file round-trips through write and parse") {
    for (const char* name : {"max_power_sweep.conf", "antenna_cdf.conf", "papr_table.conf", "single_run.conf"}) {
        const ExperimentSpec a = load_config(std::string(QCOMP_CONFIG_DIR) + "/" + name);
        std::stringstream buf;
        write_config(buf, a);
        const ExperimentSpec b = parse_config(buf);
        INFO(name);
        CHECK(a == b);
        std::stringstream again;
        write_config(again, b);
        CHECK(again.str() == buf.str());
    }
}

TEST_CASE("non-default solver settings survive a round trip") {
    ExperimentSpec a = parse(kMinimal);
    a.solver.ascent = AscentRule::Euclidean;
    a.solver.step_rule = StepRule::Fixed;
    a.solver.trace_scope = TraceScope::PerCell;
    a.solver.papr_mode = PaprMode::PerBs;
    a.solver.step_scale = 0.123456789012345;
    a.solver.inner.tol = 3e-11;
    a.share_channels_across_sweep = true;
    a.bits = {Bits::of(7), Bits::infinite()};
    a.target_sinr_db = {-1.0 / 3.0};
    std::stringstream buf;
    write_config(buf, a);
    CHECK(parse_config(buf) == a);
}

TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/qcomp.conf"), ConfigError);
}
