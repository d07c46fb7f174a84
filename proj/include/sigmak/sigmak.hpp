#pragma once

#include "sigmak/arith.hpp"
#include "sigmak/classifiers.hpp"
#include "sigmak/log_rational.hpp"
#include "sigmak/prob_model.hpp"
#include "sigmak/schinzel.hpp"
#include "sigmak/solutions.hpp"
#include "sigmak/truncation.hpp"
