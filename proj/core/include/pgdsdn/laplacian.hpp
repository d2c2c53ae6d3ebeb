#pragma once

#include "pgdsdn/filter.hpp"
#include "pgdsdn/preconditioner.hpp"

namespace pgdsdn {

struct Laplacians {
    GraphFilter combinatorial;  ///< L = D - A
    GraphFilter normalized;     ///< D^{-1/2} L D^{-1/2}
    DiagonalPreconditioner degree;
};

Laplacians laplacians(const GraphPtr& g);

}  // namespace pgdsdn
