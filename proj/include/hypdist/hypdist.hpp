#ifndef HYPDIST_HYPDIST_HPP_
#define HYPDIST_HYPDIST_HPP_

#include "automaton.hpp"
#include "battery.hpp"
#include "cayley.hpp"
#include "dimension.hpp"
#include "distortion.hpp"
#include "error.hpp"
#include "generating_set.hpp"
#include "group.hpp"
#include "measure.hpp"
#include "presentation.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "sft.hpp"

#endif  // HYPDIST_HYPDIST_HPP_
