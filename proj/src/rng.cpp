#include "narep/rng.hpp"

#include <cmath>

namespace narep {

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

}  // namespace narep
