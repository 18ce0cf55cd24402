#ifndef CFLOW_CFLOW_HPP
#define CFLOW_CFLOW_HPP

#include "cflow/distance.hpp"
#include "cflow/error.hpp"
#include "cflow/fields.hpp"
#include "cflow/flow.hpp"
#include "cflow/io.hpp"
#include "cflow/losses.hpp"
#include "cflow/operators.hpp"
#include "cflow/pipeline.hpp"
#include "cflow/refine.hpp"
#include "cflow/report.hpp"
#include "cflow/segmetrics.hpp"
#include "cflow/synth.hpp"

#endif  // CFLOW_CFLOW_HPP
