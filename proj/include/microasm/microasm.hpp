#pragma once

#include "microasm/corpus.hpp"
#include "microasm/enumeration.hpp"
#include "microasm/errors.hpp"
#include "microasm/hyperparams.hpp"
#include "microasm/lexicon.hpp"
#include "microasm/metrics.hpp"
#include "microasm/model_io.hpp"
#include "microasm/posterior.hpp"
#include "microasm/rng.hpp"
#include "microasm/sampler.hpp"
#include "microasm/state.hpp"
#include "microasm/synthetic.hpp"
