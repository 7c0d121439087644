#ifndef JOBGA_JOBGA_HPP
#define JOBGA_JOBGA_HPP

#include "jobga/bench.hpp"
#include "jobga/error.hpp"
#include "jobga/evolve.hpp"
#include "jobga/fitness.hpp"
#include "jobga/ga_config.hpp"
#include "jobga/io.hpp"
#include "jobga/model.hpp"
#include "jobga/operators.hpp"
#include "jobga/population.hpp"
#include "jobga/runtime_estimator.hpp"
#include "jobga/simulator.hpp"

#endif // JOBGA_JOBGA_HPP
