#ifndef QESA_QESA_HPP
#define QESA_QESA_HPP

#include "analysis.hpp"
#include "annealer.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "mis.hpp"
#include "quantum.hpp"
#include "rng.hpp"
#include "samples.hpp"

#endif // QESA_QESA_HPP
