#include <doctest.h>
TEST_SUITE("orchestrator") {}
