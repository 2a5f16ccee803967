#pragma once

#include "figet/analysis.hpp"
#include "figet/config.hpp"
#include "figet/corpus.hpp"
#include "figet/encoders.hpp"
#include "figet/error.hpp"
#include "figet/features.hpp"
#include "figet/label_space.hpp"
#include "figet/lstm.hpp"
#include "figet/metrics.hpp"
#include "figet/model.hpp"
#include "figet/model_io.hpp"
#include "figet/numerics.hpp"
#include "figet/tensor.hpp"
