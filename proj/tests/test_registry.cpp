#include <doctest.h>
TEST_SUITE("registry") {}
