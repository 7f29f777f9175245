#pragma once

#include "hecate/bench.hpp"
#include "hecate/bloom.hpp"
#include "hecate/bwt.hpp"
#include "hecate/bytes.hpp"
#include "hecate/cm.hpp"
#include "hecate/coder.hpp"
#include "hecate/container.hpp"
#include "hecate/error.hpp"
#include "hecate/fastx.hpp"
#include "hecate/lz.hpp"
#include "hecate/markov.hpp"
#include "hecate/packing.hpp"
#include "hecate/parallel.hpp"
#include "hecate/patch.hpp"
#include "hecate/suffix_array.hpp"
