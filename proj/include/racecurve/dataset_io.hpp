#pragma once
#include <iosfwd>
#include <string>

#include <racecurve/types.hpp>

namespace racecurve {

// CSV "xi,y" or "xi,y,block" with header; '#' lines are ignored.
Dataset read_dataset(std::istream& in, const std::string& source = "<data>");
void write_dataset(std::ostream& out, const Dataset& data);

}  // namespace racecurve
