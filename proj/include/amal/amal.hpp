#ifndef AMAL_AMAL_HPP
#define AMAL_AMAL_HPP

// Movement assessment from 3D skeleton videos: normalization, PoI-based
// temporal alignment, leave-one-out statistics, deviation segmentation,
// weighted scoring and textual feedback.

#include "amal/assess.hpp"
#include "amal/align.hpp"
#include "amal/config.hpp"
#include "amal/features.hpp"
#include "amal/feedback.hpp"
#include "amal/geometry.hpp"
#include "amal/model.hpp"
#include "amal/normalize.hpp"
#include "amal/pipeline.hpp"
#include "amal/signal.hpp"
#include "amal/skeleton.hpp"
#include "amal/skv.hpp"
#include "amal/synth.hpp"

#endif
