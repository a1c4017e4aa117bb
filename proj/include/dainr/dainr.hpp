#pragma once

#include "dainr/autodiff/adamw.hpp"
#include "dainr/autodiff/ops.hpp"
#include "dainr/baselines/hashinr.hpp"
#include "dainr/baselines/regularizers.hpp"
#include "dainr/baselines/zero_filled.hpp"
#include "dainr/cli/commands.hpp"
#include "dainr/cli/config.hpp"
#include "dainr/core/pgm.hpp"
#include "dainr/encodings/frequency.hpp"
#include "dainr/encodings/hash_grid.hpp"
#include "dainr/evaluation/metrics.hpp"
#include "dainr/mri/acquisition.hpp"
#include "dainr/mri/forward_model.hpp"
#include "dainr/mri/ndft.hpp"
#include "dainr/mri/nufft.hpp"
#include "dainr/networks/checkpoint.hpp"
#include "dainr/networks/model.hpp"
#include "dainr/phantom/dataset.hpp"
#include "dainr/training/interpolation.hpp"
#include "dainr/training/pipeline.hpp"
