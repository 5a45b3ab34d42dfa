#pragma once

#include <string>

#include "mcpsim/pointproc.hpp"
#include "mcpsim/processes.hpp"

namespace mcpsim {

// printf("%.*g") with the given number of significant digits.
std::string format_number(double v, int significant);

// CSV writers print 12 significant digits; JSON numbers are written in their
// shortest round-trip form. Column and key layouts are documented in
// schemas/.
std::string dominance_to_csv(const DominanceReport& r);
std::string dominance_to_json(const DominanceReport& r);

// CSV is the occupancy series: replica,time,process,origin_state,pop1,pop2.
std::string coupling_to_csv(const CoupledRunReport& r);
std::string coupling_to_json(const CoupledRunReport& r);

std::string survival_to_csv(const SurvivalEstimate& s);
std::string survival_to_json(const SurvivalEstimate& s);

}  // namespace mcpsim
