#include <catch2/catch_amalgamated.hpp>

TEST_CASE("placeholder: workspace suite pending") {
    SUCCEED();
}
