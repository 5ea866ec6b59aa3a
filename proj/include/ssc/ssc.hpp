#pragma once

#include "ssc/auditor.hpp"
#include "ssc/decimal.hpp"
#include "ssc/emitter.hpp"
#include "ssc/evaluator.hpp"
#include "ssc/layout.hpp"
#include "ssc/model.hpp"
#include "ssc/parser.hpp"
#include "ssc/pipeline.hpp"
#include "ssc/serialize.hpp"
#include "ssc/structurer.hpp"
