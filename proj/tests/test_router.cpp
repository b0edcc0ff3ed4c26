#include <doctest.h>
TEST_SUITE("router") {}
