#pragma once

#include "pts/box.hpp"
#include "pts/config.hpp"
#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"
#include "pts/io.hpp"
#include "pts/matcher.hpp"
#include "pts/metrics.hpp"
#include "pts/motion.hpp"
#include "pts/pipeline.hpp"
#include "pts/random.hpp"
#include "pts/region.hpp"
#include "pts/synth.hpp"
#include "pts/track_types.hpp"
