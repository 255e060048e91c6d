#pragma once

#include "scieval/config.hpp"
#include "scieval/corpus.hpp"
#include "scieval/error.hpp"
#include "scieval/indicators.hpp"
#include "scieval/pipeline.hpp"
#include "scieval/ranking.hpp"
#include "scieval/stats.hpp"
#include "scieval/synth.hpp"
#include "scieval/table.hpp"
#include "scieval/version.hpp"
