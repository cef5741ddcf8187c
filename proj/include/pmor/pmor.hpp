#pragma once

#include "pmor/affine/affine_family.hpp"
#include "pmor/krylov/gcro.hpp"
#include "pmor/rpmor/model.hpp"
#include "pmor/rpmor/pipeline.hpp"
#include "pmor/spai/preconditioner.hpp"
#include "pmor/spai/spai.hpp"
#include "pmor/spai/spai_update.hpp"
#include "pmor/sparse/dense.hpp"
#include "pmor/sparse/matrix_market.hpp"
#include "pmor/sparse/sparse_matrix.hpp"
#include "pmor/zoo/gyro.hpp"
#include "pmor/zoo/heat.hpp"
#include "pmor/zoo/penzl.hpp"
#include "pmor/zoo/sequences.hpp"
