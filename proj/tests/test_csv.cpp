#include "coxcs/csv.hpp"
#include "coxcs/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace coxcs;

TEST_SUITE("csv")
{
    TEST_CASE("three rows with two covariates")
    {
        std::istringstream in("time,status,z1,z2\n1,1,0.5,2\n2,0,1e-3,-4\n3.25,1,7,8\n");
        const auto d = read_csv(in);
        CHECK(d.n() == 3);
        CHECK(d.p() == 2);
        CHECK(d.covariate_names() == std::vector<std::string>{"z1", "z2"});
        CHECK(d.covariates()(1, 0) == 1e-3);
        CHECK(d.time()[2] == 3.25);
        CHECK(d.status()[1] == 0);
    }

    TEST_CASE("column order and names come from the header")
    {
        std::istringstream in("age,event,followup,dose\n50,1,3,0.1\n60,0,4,0.2\n");
        ColumnSchema schema;
        schema.time_column = "followup";
        schema.status_column = "event";
        const auto d = read_csv(in, schema);
        CHECK(d.covariate_names() == std::vector<std::string>{"age", "dose"});
        CHECK(d.time()[1] == 4.0);
        CHECK(d.covariates()(1, 0) == 60.0);
    }

    TEST_CASE("explicit covariate list")
    {
        std::istringstream in("time,status,a,b,c\n1,1,1,2,3\n2,1,4,5,6\n");
        ColumnSchema schema;
        schema.covariate_columns = std::vector<std::string>{"c", "a"};
        const auto d = read_csv(in, schema);
        CHECK(d.p() == 2);
        CHECK(d.covariates()(1, 0) == 6.0);
        CHECK(d.covariates()(1, 1) == 4.0);
    }

    TEST_CASE("NaN cell is rejected with its file line and column")
    {
        std::istringstream in("time,status,z1\n1,1,0.5\n2,1,NaN\n");
        try {
            read_csv(in);
            FAIL("expected an error");
        } catch (const Error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row 3") != std::string::npos);
            CHECK(msg.find("z1") != std::string::npos);
        }
    }

    TEST_CASE("malformed cells, missing columns and ragged rows")
    {
        std::istringstream bad("time,status,z1\n1,1,abc\n");
        CHECK_THROWS_AS(read_csv(bad), ValidationError);
        std::istringstream missing("t,status,z1\n1,1,0\n");
        CHECK_THROWS_WITH(read_csv(missing), doctest::Contains("time"));
        std::istringstream ragged("time,status,z1\n1,1,0\n2,1\n");
        CHECK_THROWS_AS(read_csv(ragged), ValidationError);
    }

    TEST_CASE("status 2 is a validation error")
    {
        std::istringstream in("time,status,z1\n1,2,0\n2,1,1\n");
        CHECK_THROWS_AS(read_csv(in), ValidationError);
    }

    TEST_CASE("missing file is an io error")
    {
        CHECK_THROWS_AS(read_csv(std::filesystem::path("/nonexistent/x.csv")), IoError);
    }

    TEST_CASE("write then read round-trips exactly")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto d = oracle::random_dataset(seed, 25, 4);
            std::stringstream buf;
            write_csv(buf, d);
            const auto back = read_csv(buf);
            CHECK(back.time() == d.time());
            CHECK(back.status() == d.status());
            CHECK(back.covariates() == d.covariates());
            CHECK(back.covariate_names() == d.covariate_names());
        }
    }

    TEST_CASE("format_double keeps 17 significant digits")
    {
        CHECK(format_double(0.1) == "0.10000000000000001");
        CHECK(format_double(2.0) == "2");
    }
}
