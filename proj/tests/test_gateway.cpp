#include <doctest.h>
TEST_SUITE("gateway") {}
