// SPDX-License-Identifier: Apache-2.0
//
// gridless: gridless channel estimation for hybrid MIMO receivers with low-resolution ADCs
// Copyright (C) 2026 The gridless authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------



#include "gridless/harness.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

using namespace gridless;

namespace
{

ExperimentConfig small_config()
{
    ExperimentConfig c = parse_config("M = 8\nR = 2\nK = 1\nD = 2\nN = 40\nL = 1\n"
                                      "snr_db = 10\nbits = 2\ntrials = 3\nseed = 5\nthreads = 1\n");
    return c;
}

std::filesystem::path scratch(const std::string &name)
{
    const auto dir = std::filesystem::temp_directory_path() / "gridless_test_harness";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string &csv)
{
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
            out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("nmse examples", "[nmse]")
{
    CVec h(2);
    h << cplx(1.0, 0.0), cplx(0.0, 1.0);
    CHECK(nmse(h, h) == 0.0);
    CHECK(nmse(CVec::Zero(2), h) == 1.0);
    CHECK(nmse(2.0 * h, h) == Catch::Approx(1.0));
    CHECK(nmse(1.1 * h, h) == Catch::Approx(0.01));
    CHECK_THROWS_AS(nmse(h, CVec::Zero(2)), InputError);
    CHECK_THROWS_AS(nmse(CVec::Zero(3), h), InputError);
}

TEST_CASE("config defaults and parsing", "[config]")
{
    const ExperimentConfig d = parse_config("");
    CHECK(d.system.antennas == 32);
    CHECK(d.system.rf_chains == 8);
    CHECK(d.system.users == 4);
    CHECK(d.system.slots == 1600);
    CHECK(d.system.total_paths() == 8);
    CHECK(d.bits_grid == std::vector<int>{1, 2, 3, 4});
    CHECK(d.estimators == std::vector<EstimatorKind>{EstimatorKind::nfcfgs_cv});

    const ExperimentConfig c = parse_config("# comment\nM = 16   # trailing\nK = 2\nL = 3, 1\nestimators = nfcfgs_cv, oracle_stop\n"
                                            "snr_db = -5, 2.5\nseed = 18446744073709551615\nkeep_best_cv = false\n");
    CHECK(c.system.antennas == 16);
    CHECK(c.system.paths_per_user == std::vector<int>{3, 1});
    CHECK(c.estimators == std::vector<EstimatorKind>{EstimatorKind::nfcfgs_cv, EstimatorKind::oracle_stop});
    CHECK(c.snr_grid_db == std::vector<double>{-5.0, 2.5});
    CHECK(c.seed == 18446744073709551615ull);
    CHECK_FALSE(c.estimator.keep_best_cv);

    CHECK(resolved_config(c) == resolved_config(parse_config(resolved_config(c))));
    CHECK(config_hash(c) == config_hash(parse_config(resolved_config(c))));
    CHECK(config_hash(c) != config_hash(d));
}

TEST_CASE("config errors", "[config]")
{
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("M 16\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("M = sixteen\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("estimators = magic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("keep_best_cv = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("bits = 13\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("trials = -1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("R = 64\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("K = 2\nL = 1, 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("cv_fraction = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), IoError);
}

TEST_CASE("zero trials yields only the header", "[run]")
{
    ExperimentConfig c = small_config();
    c.trials = 0;
    const ResultTable t = run_experiment(c);
    CHECK(t.rows.empty());
    const std::string csv = format_csv(t);
    CHECK(data_lines(csv) == std::vector<std::string>{"trial,seed,estimator,snr_db,bits,nmse,path_count,iterations,runtime_s"});
}

TEST_CASE("experiments are deterministic across thread counts", "[run][property]")
{
    ExperimentConfig c = small_config();
    c.estimators = {EstimatorKind::nfcfgs_cv, EstimatorKind::ongrid_fcfgs_cv, EstimatorKind::oracle_stop};
    c.snr_grid_db = {0, 20};
    const std::string a = format_csv(run_experiment(c));
    c.threads = 3;
    const std::string b = format_csv(run_experiment(c));
    CHECK(a == b);
}

TEST_CASE("row layout and paired seeding", "[run][property]")
{
    ExperimentConfig c = load_config(GRIDLESS_SOURCE_DIR "/configs/desk.cfg");
    c.trials = 50;
    c.snr_grid_db = {0, 20};
    c.bits_grid = {1, 3};
    c.system.slots = 100;
    const ResultTable t = run_experiment(c);
    REQUIRE(t.rows.size() == 50u * 2u * 2u * 2u);
    std::map<int, std::uint64_t> seed_of;
    std::map<std::tuple<int, double, int>, std::uint64_t> print_of;
    for (const TrialResult &r : t.rows)
    {
        CHECK(r.error.empty());
        CHECK(std::isfinite(r.nmse));
        CHECK(r.nmse >= 0.0);
        CHECK(std::isnan(r.runtime_s));
        CHECK(r.seed == trial_seed(c.seed, r.trial));
        auto [it, fresh] = seed_of.emplace(r.trial, r.seed);
        CHECK(it->second == r.seed);
        // estimators at one (trial, snr, bits) see the identical realization
        auto [jt, fresh2] = print_of.emplace(std::tuple{r.trial, r.snr_db, r.bits}, r.realization);
        CHECK(jt->second == r.realization);
    }
    std::set<std::uint64_t> seeds;
    for (const auto &[trial, s] : seed_of)
        seeds.insert(s);
    CHECK(seeds.size() == 50u);
}

TEST_CASE("the channel is shared across SNR and bit depth", "[run][property]")
{
    const SystemConfig sys = small_config().system;
    const TrialRealization a = realize_trial(sys, 0.0, 1, 9, 4), b = realize_trial(sys, 20.0, 3, 9, 4);
    CHECK(a.channel.h == b.channel.h);
    CHECK(a.split_seed == b.split_seed);
    CHECK(a.model.combiner(0) == b.model.combiner(0));
    const TrialRealization c = realize_trial(sys, 0.0, 1, 9, 5);
    CHECK(a.channel.h != c.channel.h);
    CHECK(a.fingerprint() == realize_trial(sys, 0.0, 1, 9, 4).fingerprint());
}

TEST_CASE("estimator failures are recorded per row", "[run]")
{
    ExperimentConfig c = small_config();
    c.system.slots = 10;
    c.estimator.cv_fraction = 0.999;
    const ResultTable t = run_experiment(c);
    REQUIRE(t.rows.size() == 3u);
    for (const TrialResult &r : t.rows)
    {
        CHECK(std::isnan(r.nmse));
        CHECK_FALSE(r.error.empty());
    }
    CHECK(summarize(t).empty());
    CHECK_THROWS_AS(render_plot_svg(t), InputError);
}

TEST_CASE("CSV writing and appending", "[csv]")
{
    ExperimentConfig c = small_config();
    const ResultTable t = run_experiment(c);
    const auto path = scratch("results.csv");
    write_csv(t, path.string());
    const std::string first = slurp(path);
    CHECK(first == format_csv(t));
    const auto lines = data_lines(first);
    REQUIRE(lines.size() == 4u);
    CHECK(lines[0] == "trial,seed,estimator,snr_db,bits,nmse,path_count,iterations,runtime_s");
    const std::regex row(R"(^\d+,\d+,nfcfgs_cv,10,2,[-+.eE0-9]+,\d+,\d+,nan$)");
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(std::regex_match(lines[i], row));

    write_csv(t, path.string(), true);
    CHECK(data_lines(slurp(path)).size() == 7u);

    ExperimentConfig other = c;
    other.seed = 6;
    CHECK_THROWS_AS(write_csv(run_experiment(other), path.string(), true), IoError);
    CHECK(data_lines(slurp(path)).size() == 7u);

    const auto fresh = scratch("fresh.csv");
    write_csv(t, fresh.string(), true);
    CHECK(slurp(fresh) == first);

    CHECK_THROWS_AS(write_csv(t, "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("SVG plot content", "[plot]")
{
    ExperimentConfig c = small_config();
    c.bits_grid = {1, 2, 3};
    c.snr_grid_db = {0, 10};
    c.estimators = {EstimatorKind::nfcfgs_cv, EstimatorKind::ongrid_fcfgs_cv};
    const ResultTable t = run_experiment(c);
    const std::string svg = render_plot_svg(t);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg ") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    std::size_t subplots = 0;
    for (std::size_t pos = 0; (pos = svg.find("<g class=\"subplot\"", pos)) != std::string::npos; ++pos)
        ++subplots;
    CHECK(subplots == 3u);

    // tags balance
    std::size_t open_g = 0, close_g = 0;
    for (std::size_t pos = 0; (pos = svg.find("<g ", pos)) != std::string::npos; ++pos)
        ++open_g;
    for (std::size_t pos = 0; (pos = svg.find("</g>", pos)) != std::string::npos; ++pos)
        ++close_g;
    CHECK(open_g == close_g);

    const std::vector<CurvePoint> points = summarize(t);
    CHECK(points.size() == 3u * 2u * 2u);
    const std::regex marker(R"re(data-bits="(\d+)" data-estimator="([a-z_]+)" data-snr="([^"]+)" data-nmse="([^"]+)")re");
    std::size_t matched = 0;
    for (std::sregex_iterator it(svg.begin(), svg.end(), marker), end; it != end; ++it)
    {
        const int bits = std::stoi((*it)[1]);
        const EstimatorKind kind = parse_estimator((*it)[2]);
        const double snr = std::stod((*it)[3]);
        const double value = std::stod((*it)[4]);
        bool found = false;
        for (const CurvePoint &p : points)
            if (p.bits == bits && p.estimator == kind && p.snr_db == snr)
            {
                found = true;
                CHECK(std::abs(value - p.mean_nmse) <= 1e-12 * p.mean_nmse);
            }
        CHECK(found);
        ++matched;
    }
    CHECK(matched == points.size());

    const auto path = scratch("plot.svg");
    emit_plot(t, path.string());
    CHECK(slurp(path) == svg);
    CHECK_THROWS_AS(emit_plot(t, "/nonexistent/dir/plot.svg"), IoError);
    CHECK_THROWS_AS(render_plot_svg(ResultTable{c, {}}), InputError);
}
