#include "coxcs/error.hpp"
#include "coxcs/survival.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <limits>

using namespace coxcs;

namespace {

SurvivalDataset make(std::vector<double> t, std::vector<int> d, std::vector<std::vector<double>> cols)
{
    const auto n = static_cast<Index>(t.size());
    Eigen::MatrixXd z(n, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (Index i = 0; i < n; ++i) z(i, static_cast<Index>(j)) = cols[j][static_cast<std::size_t>(i)];
    return SurvivalDataset(Eigen::Map<Eigen::VectorXd>(t.data(), n), Eigen::Map<Eigen::VectorXi>(d.data(), n), z);
}

} // namespace

TEST_SUITE("survival")
{
    TEST_CASE("validate counts events and censorings")
    {
        const auto data = make({1, 2, 3}, {1, 0, 1}, {{0.1, 0.2, 0.3}});
        const auto r = validate(data);
        CHECK(r.events == 2);
        CHECK(r.censored == 1);
        CHECK(r.constant_columns.empty());
    }

    TEST_CASE("validate rejects data without events")
    {
        const auto data = make({1, 2, 3}, {0, 0, 0}, {{0.1, 0.2, 0.3}});
        CHECK_THROWS_AS(validate(data), ValidationError);
    }

    TEST_CASE("constant columns and tied times are reported")
    {
        const auto data = make({1, 1, 3, 3}, {1, 0, 1, 1}, {{5, 5, 5, 5}, {1, 2, 3, 4}});
        const auto r = validate(data);
        REQUIRE(r.constant_columns.size() == 1);
        CHECK(r.constant_columns[0] == 0);
        CHECK(r.tied_time_values == 2);
    }

    TEST_CASE("construction enforces the observation invariants")
    {
        CHECK_THROWS_AS(make({1}, {1}, {{0.0}}), ValidationError);
        CHECK_THROWS_AS(make({-1, 2}, {1, 1}, {{0.0, 1.0}}), ValidationError);
        CHECK_THROWS_AS(make({1, 2}, {2, 1}, {{0.0, 1.0}}), ValidationError);
        CHECK_THROWS_AS(make({1, std::numeric_limits<double>::infinity()}, {1, 1}, {{0.0, 1.0}}), ValidationError);
        CHECK_THROWS_AS(make({1, 2}, {1, 1}, {{0.0, std::nan("")}}), ValidationError);
        CHECK_NOTHROW(make({0, 2}, {1, 1}, {{0.0, 1.0}}));
    }

    TEST_CASE("sorted index puts events before censorings at tied times")
    {
        const auto data = make({3, 2, 2, 1, 2}, {1, 0, 1, 1, 1}, {{0, 0, 0, 0, 1}});
        const std::vector<Index> expected{3, 2, 4, 1, 0};
        CHECK(data.sorted_index() == expected);
    }

    TEST_CASE("risk sets for strictly ordered event times")
    {
        const auto rs = build_risk_sets(make({1, 2, 3}, {1, 1, 1}, {{0, 1, 2}}));
        REQUIRE(rs.size() == 3);
        CHECK(rs.risk_set_size(0) == 3);
        CHECK(rs.risk_set_size(1) == 2);
        CHECK(rs.risk_set_size(2) == 1);
    }

    TEST_CASE("tied event times share one entry")
    {
        const auto rs = build_risk_sets(make({2, 2, 3}, {1, 1, 1}, {{0, 1, 2}}));
        CHECK(rs.event_times == std::vector<double>{2, 3});
        CHECK(rs.event_counts == std::vector<Index>{2, 1});
    }

    TEST_CASE("censored subject leaves before a later event")
    {
        const auto rs = build_risk_sets(make({1, 2}, {0, 1}, {{0, 1}}));
        REQUIRE(rs.size() == 1);
        CHECK(rs.event_times[0] == 2.0);
        REQUIRE(rs.members(0).size() == 1);
        CHECK(rs.members(0)[0] == 1);
    }

    TEST_CASE("risk sets match the definition on random data with ties")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Rng rng(seed);
            const Index n = 30;
            Eigen::VectorXd t(n);
            Eigen::VectorXi d(n);
            for (Index i = 0; i < n; ++i) {
                t[i] = std::floor(rng.uniform() * 8.0);
                d[i] = rng.uniform() < 0.6;
            }
            d[0] = 1;
            const SurvivalDataset data(t, d, Eigen::MatrixXd::Zero(n, 1));
            const auto rs = build_risk_sets(data);
            Index total = 0;
            for (Index k = 0; k < rs.size(); ++k) {
                total += rs.event_counts[static_cast<std::size_t>(k)];
                const double tk = rs.event_times[static_cast<std::size_t>(k)];
                if (k > 0) CHECK(tk > rs.event_times[static_cast<std::size_t>(k - 1)]);
                std::vector<Index> want;
                Index events_here = 0;
                for (Index i = 0; i < n; ++i) {
                    if (t[i] >= tk) want.push_back(i);
                    if (t[i] == tk && d[i] == 1) ++events_here;
                }
                CHECK(events_here == rs.event_counts[static_cast<std::size_t>(k)]);
                std::vector<Index> got(rs.members(k).begin(), rs.members(k).end());
                std::sort(got.begin(), got.end());
                CHECK(got == want);
                // Nested: later risk sets are suffixes of earlier ones.
                if (k > 0) CHECK(rs.risk_start[static_cast<std::size_t>(k)] > rs.risk_start[static_cast<std::size_t>(k - 1)]);
            }
            CHECK(total == validate(data).events);
        }
    }

    TEST_CASE("conditioning set invariants")
    {
        const auto data = make({1, 2, 3}, {1, 1, 1}, {{0, 1, 2}, {1, 0, 1}});
        CHECK_THROWS_AS(ConditioningSet({0, 0}), ValidationError);
        CHECK_THROWS_AS(ConditioningSet({-1}), ValidationError);
        CHECK_THROWS_AS(ConditioningSet({2}).check(data), ValidationError);
        CHECK_NOTHROW(ConditioningSet({1, 0}).check(data));
        CHECK(ConditioningSet({1, 0}).indices() == std::vector<Index>{0, 1});
        const auto tiny = make({1, 2}, {1, 1}, {{0, 1}, {1, 0}});
        CHECK_THROWS_AS(ConditioningSet({0, 1}).check(tiny), ValidationError);
    }

    TEST_CASE("standardize maps (1,2,3) to (-1,0,1)")
    {
        const auto s = standardize(make({1, 2, 3}, {1, 1, 1}, {{1, 2, 3}}));
        CHECK(s.dataset.covariates()(0, 0) == doctest::Approx(-1.0));
        CHECK(s.dataset.covariates()(1, 0) == doctest::Approx(0.0));
        CHECK(s.dataset.covariates()(2, 0) == doctest::Approx(1.0));
        CHECK(s.scaling.means[0] == doctest::Approx(2.0));
        CHECK(s.scaling.scales[0] == doctest::Approx(1.0));
    }

    TEST_CASE("standardize rejects constant columns by name")
    {
        const auto data = make({1, 2, 3}, {1, 1, 1}, {{1, 2, 3}, {4, 4, 4}});
        CHECK_THROWS_WITH_AS(standardize(data), doctest::Contains("z2"), ValidationError);
    }

    TEST_CASE("standardize is idempotent and restorable")
    {
        const auto data = oracle::random_dataset(7, 40, 5);
        const auto once = standardize(data);
        const auto twice = standardize(once.dataset);
        CHECK((once.dataset.covariates() - twice.dataset.covariates()).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd back = once.scaling.restore(once.dataset.covariates());
        CHECK((back - data.covariates()).cwiseAbs().maxCoeff() < 1e-12);
        for (Index j = 0; j < 5; ++j) {
            const auto col = once.dataset.column(j);
            CHECK(std::abs(col.mean()) < 1e-12);
            CHECK((col.array() - col.mean()).square().sum() / 39.0 == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("observation round trip")
    {
        const auto data = make({1.5, 2.5}, {1, 0}, {{3, 4}, {5, 6}});
        const auto obs = data.observation(1);
        CHECK(obs.time == 2.5);
        CHECK(obs.status == 0);
        CHECK(obs.covariates == std::vector<double>{4, 6});
        std::vector<Observation> all{data.observation(0), data.observation(1)};
        const auto back = SurvivalDataset::from_observations(all, data.covariate_names());
        CHECK(back.covariates() == data.covariates());
        CHECK(back.covariate_names() == std::vector<std::string>{"z1", "z2"});
    }
}
