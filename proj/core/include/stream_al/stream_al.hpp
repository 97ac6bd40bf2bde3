#pragma once

#include "stream_al/datagen.hpp"
#include "stream_al/design.hpp"
#include "stream_al/engine.hpp"
#include "stream_al/errors.hpp"
#include "stream_al/harness.hpp"
#include "stream_al/kde.hpp"
#include "stream_al/linalg.hpp"
#include "stream_al/regression.hpp"
#include "stream_al/strategy.hpp"
#include "stream_al/stream.hpp"
#include "stream_al/whitening.hpp"
