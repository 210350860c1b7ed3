#pragma once

#include "cqc/dictionary.hpp"
#include "cqc/enhancer.hpp"
#include "cqc/error.hpp"
#include "cqc/evaluation.hpp"
#include "cqc/format.hpp"
#include "cqc/graph.hpp"
#include "cqc/mapping.hpp"
#include "cqc/paths.hpp"
#include "cqc/random.hpp"
#include "cqc/rivals.hpp"
#include "cqc/scoring.hpp"
#include "cqc/synonyms.hpp"
