#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "routesim/routesim.h"

int main(int argc, char** argv) {
  routesim_configure_logging();
  return doctest::Context(argc, argv).run();
}
