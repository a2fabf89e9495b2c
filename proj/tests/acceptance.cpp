#include "losmimo/validation.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  losmimo::ValidationOptions o;
  if (const char* w = std::getenv("LOSMIMO_WORKERS")) o.workers = std::max(1, std::atoi(w));
  if (const char* s = std::getenv("LOSMIMO_SEED")) o.seed = std::strtoull(s, nullptr, 10);
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--skip-n96") o.with_n96 = false;
  return losmimo::run_validation(o, std::cout) ? 0 : 1;
}
