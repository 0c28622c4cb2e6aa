#pragma once

// Umbrella header for the odecert hybrid-program verification toolkit.

#include "cas.hpp"
#include "discharge.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "flows.hpp"
#include "hprog.hpp"
#include "ir.hpp"
#include "lie.hpp"
#include "parser.hpp"
#include "poly.hpp"
#include "pred.hpp"
#include "printer.hpp"
#include "rational.hpp"
#include "rk4.hpp"
#include "simplify.hpp"
#include "simulate.hpp"
#include "smt.hpp"
#include "solve.hpp"
#include "transformers.hpp"
#include "vc.hpp"
#include "verify.hpp"
