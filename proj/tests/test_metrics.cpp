#include "coxcs/error.hpp"
#include "coxcs/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace coxcs;

namespace {

// Smallest k whose prefix holds every active variable outside C.
Index mms_oracle(const std::vector<Index>& ranking, const std::vector<Index>& active, const ConditioningSet& c)
{
    for (Index k = 0; k <= static_cast<Index>(ranking.size()); ++k) {
        bool all = true;
        for (auto j : active)
            all &= c.contains(j) || std::find(ranking.begin(), ranking.begin() + k, j) != ranking.begin() + k;
        if (all) return k;
    }
    return -1;
}

} // namespace

TEST_SUITE("metrics")
{
    TEST_CASE("minimum model size by hand")
    {
        const std::vector<Index> ranking{4, 0, 7, 2, 9, 1};
        const std::vector<Index> active{0, 2};
        CHECK(mms(ranking, active, ConditioningSet{}, 0) == 4);
        CHECK(mms(ranking, std::vector<Index>{4}, ConditioningSet{}, 0) == 1);
        CHECK(mms(ranking, active, ConditioningSet({2}), 1) == 3);
        const std::vector<Index> missing{3};
        CHECK_THROWS_AS(mms(ranking, missing, ConditioningSet{}, 0), ValidationError);
    }

    TEST_CASE("TPR and sure screening by hand")
    {
        const std::vector<Index> ranking{4, 0, 7, 2, 9, 1};
        const std::vector<Index> active{0, 1, 2, 3};
        CHECK(tpr(ranking, active, 2, ConditioningSet{}) == 0.25);
        CHECK(tpr(ranking, active, 6, ConditioningSet{}) == 0.75);
        CHECK(tpr(ranking, active, 2, ConditioningSet({3})) == 0.5);
        CHECK_THROWS_AS(tpr(ranking, active, 0, ConditioningSet{}), ConfigError);
        CHECK_FALSE(sure_screened(ranking, std::vector<Index>{0, 2}, 3, ConditioningSet{}));
        CHECK(sure_screened(ranking, std::vector<Index>{0, 2}, 4, ConditioningSet{}));
        CHECK(sure_screened(ranking, std::vector<Index>{0, 3}, 2, ConditioningSet({3})));
    }

    TEST_CASE("metrics agree with direct enumeration on random permutations")
    {
        Rng rng(1);
        for (int trial = 0; trial < 200; ++trial) {
            const Index p = 5 + static_cast<Index>(rng.uniform() * 30);
            std::vector<Index> perm(static_cast<std::size_t>(p));
            std::iota(perm.begin(), perm.end(), Index{0});
            for (Index k = p - 1; k > 0; --k)
                std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(rng.uniform() * (k + 1))]);
            std::vector<Index> active(perm.begin(), perm.begin() + 3);
            std::sort(active.begin(), active.end());
            const ConditioningSet c(trial % 2 == 0 ? std::vector<Index>{} : std::vector<Index>{active[1]});
            std::vector<Index> ranking;
            for (Index j = p - 1; j >= 0; --j)
                if (!c.contains(perm[static_cast<std::size_t>(j)])) ranking.push_back(perm[static_cast<std::size_t>(j)]);
            const Index m = mms(ranking, active, c, 0);
            CHECK(m == mms_oracle(ranking, active, c));
            CHECK(mms(ranking, active, c, c.size()) == m + c.size());
            double last = 0.0;
            for (Index b = 1; b <= static_cast<Index>(ranking.size()); ++b) {
                const double t = tpr(ranking, active, b, c);
                CHECK(t >= last);
                last = t;
                CHECK(sure_screened(ranking, active, b, c) == (b >= m));
                CHECK((t == 1.0) == (b >= m));
            }
        }
    }

    TEST_CASE("quantile is type 7")
    {
        CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
        CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
        CHECK(quantile({5}, 0.9) == 5.0);
        Rng rng(2);
        std::vector<double> v(37);
        for (auto& x : v) x = rng.normal();
        for (double q : {0.1, 0.25, 0.5, 0.9}) CHECK(quantile(v, q) == oracle::quantile(v, q));
    }

    TEST_CASE("summarize")
    {
        std::vector<ReplicateScore> s{{"A", 0, 1, 1.0, true}, {"A", 1, 2, 0.5, false}, {"A", 2, 3, 0.0, true}};
        const auto a = summarize(s);
        CHECK(a.median_mms == 2.0);
        CHECK(a.iqr_mms == 1.0);
        CHECK(a.median_tpr == 0.5);
        CHECK(a.sure_rate == doctest::Approx(2.0 / 3.0));
        CHECK(a.replicates == 3);
        std::reverse(s.begin(), s.end());
        const auto b = summarize(s);
        CHECK(b.median_mms == a.median_mms);
        CHECK(b.iqr_tpr == a.iqr_tpr);
        s.push_back({"B", 3, 1, 1.0, true});
        CHECK_THROWS(summarize(s));
    }

    TEST_CASE("score and summary files")
    {
        std::ostringstream out;
        const std::vector<BenchmarkSummary> rows{{"CS-MPLE", 2.0, 0.5, 1.0, 0.0, 0.9, 10}};
        write_summary_csv(out, rows, "cfg");
        CHECK(out.str() == "method,config_id,median_mms,iqr_mms,median_tpr,iqr_tpr,sure_rate,replicates\n"
                           "CS-MPLE,cfg,2,0.5,1,0,0.90000000000000002,10\n");
    }

    TEST_CASE("kernel density of a standard normal sample")
    {
        Rng rng(3);
        DensityGroup g{"z", std::vector<double>(5000)};
        for (auto& x : g.values) x = rng.normal();
        const std::vector<DensityGroup> groups{g, DensityGroup{"copy", g.values}};
        auto grid = density_grid(groups);
        CHECK(grid.size() == 512);
        // Add the origin so the density there is read directly.
        grid.push_back(0.0);
        std::sort(grid.begin(), grid.end());
        const auto table = export_density_data(groups, grid);
        REQUIRE(table.curves.size() == 2);
        const auto& c = table.curves[0];
        const auto at0 = static_cast<std::size_t>(std::find(table.grid.begin(), table.grid.end(), 0.0) - table.grid.begin());
        CHECK(c.density[at0] == doctest::Approx(0.3989).epsilon(0.05));
        CHECK(std::abs(c.integral - 1.0) < 0.01);
        CHECK(c.density == table.curves[1].density);
        CHECK(c.bandwidth > 0.0);
    }

    TEST_CASE("zero-variance group is a point mass")
    {
        const std::vector<DensityGroup> groups{{"a", {2.0, 2.0, 2.0}}, {"b", {1.0, 3.0, 2.0}}};
        const auto table = export_density_data(groups, density_grid(groups, 64));
        CHECK(table.curves[0].point_mass);
        CHECK(table.curves[0].location == 2.0);
        CHECK(table.curves[0].density.empty());
        CHECK_FALSE(table.curves[1].point_mass);
        std::ostringstream out;
        write_density_csv(out, table);
        CHECK(out.str().find("a,2,point_mass\n") != std::string::npos);
        const std::vector<DensityGroup> tiny{{"x", {1.0}}};
        CHECK_THROWS(export_density_data(tiny, {0.0, 1.0}));
    }
}
