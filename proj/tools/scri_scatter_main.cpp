// scri-scatter: run orchestration for the conformal scattering laboratory.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scri_scatter/cauchy.hpp"
#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/config.hpp"
#include "scri_scatter/energy.hpp"
#include "scri_scatter/io.hpp"
#include "scri_scatter/labs.hpp"
#include "scri_scatter/nullgrid.hpp"
#include "scri_scatter/scatter.hpp"
#include "scri_scatter/version.hpp"

int main(int argc, char **argv) {
  std::cout << "scri-scatter " << scri::version_string << "\n";
  (void)argc;
  (void)argv;
  return 0;
}
