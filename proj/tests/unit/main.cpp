#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "support.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace homog::test {

std::uint64_t base_seed() {
  static const std::uint64_t seed = [] {
    const char* env = std::getenv("HOMOG_TEST_SEED");
    return env ? std::stoull(env) : 20240611ULL;
  }();
  return seed;
}

}  // namespace homog::test

int main(int argc, char** argv) {
  std::printf("test seed %llu\n", static_cast<unsigned long long>(homog::test::base_seed()));
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
