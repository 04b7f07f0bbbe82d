#pragma once

#include "mbang/bench.hpp"      // IWYU pragma: export
#include "mbang/cumulants.hpp"  // IWYU pragma: export
#include "mbang/discovery.hpp"  // IWYU pragma: export
#include "mbang/errors.hpp"     // IWYU pragma: export
#include "mbang/graph.hpp"      // IWYU pragma: export
#include "mbang/io.hpp"         // IWYU pragma: export
#include "mbang/lsem.hpp"       // IWYU pragma: export
#include "mbang/matrix.hpp"     // IWYU pragma: export
#include "mbang/noise.hpp"      // IWYU pragma: export
#include "mbang/partitions.hpp" // IWYU pragma: export
