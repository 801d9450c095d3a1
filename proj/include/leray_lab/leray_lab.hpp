#pragma once

#include "leray_lab/bounds.hpp"
#include "leray_lab/corpus.hpp"
#include "leray_lab/diagnostics.hpp"
#include "leray_lab/field.hpp"
#include "leray_lab/grid.hpp"
#include "leray_lab/inequalities.hpp"
#include "leray_lab/io.hpp"
#include "leray_lab/norms.hpp"
#include "leray_lab/quadrature.hpp"
#include "leray_lab/radial.hpp"
#include "leray_lab/scan.hpp"
#include "leray_lab/solver.hpp"
#include "leray_lab/spectral_ops.hpp"
#include "leray_lab/trajectory.hpp"
