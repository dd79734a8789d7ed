#pragma once

#include "curvedrt/pg_spaces.hpp"

#include <string>
#include <vector>

namespace curvedrt {

/// A built-in benchmark problem with manufactured exact solution. Meshes are
/// produced per refinement level m (grid parameter 2^m).
struct TestCase {
    std::string name;
    DomainBoundary domain;
    std::function<Mesh(int)> make_mesh; // argument: level m >= 1
    ScalarField u;
    VectorField p;      // p = grad u
    ScalarField div_p;  // = -f
    ScalarField f;
};

std::vector<std::string> case_names();
TestCase make_case(const std::string& name);

} // namespace curvedrt
