#include "umsa/model.hpp"

#include <cmath>

namespace umsa {

double Model::step_cost(int level, double omega) const { return std::pow(mesh(level), -omega); }

}  // namespace umsa
