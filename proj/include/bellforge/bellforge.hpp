#pragma once

#include "bellforge/bell.hpp"
#include "bellforge/dso.hpp"
#include "bellforge/matrix_io.hpp"
#include "bellforge/states.hpp"
#include "bellforge/tensor_operator.hpp"
