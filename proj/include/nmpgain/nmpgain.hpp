#pragma once

#include "error.hpp"
#include "factorization.hpp"
#include "gains.hpp"
#include "limits.hpp"
#include "polynomial.hpp"
#include "transfer.hpp"
#include "witness.hpp"
