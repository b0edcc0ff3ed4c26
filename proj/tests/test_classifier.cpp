#include <doctest.h>
TEST_SUITE("classifier") {}
