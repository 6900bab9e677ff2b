#include <cstdio>

#include "curvnet/flow.hpp"

int main() {
  std::puts("curvnet cli placeholder");
  return 0;
}
