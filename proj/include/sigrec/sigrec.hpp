#ifndef SIGREC_SIGREC_HPP
#define SIGREC_SIGREC_HPP

// Reconstruction of the conductivity sigma in div(sigma grad u) = 0 from
// interior measurements of u: the problem is recast as a regularized steady
// transport equation for gamma = sqrt(sigma) and solved with an upwind
// discontinuous Galerkin method.

#include "sigrec/basis.hpp"
#include "sigrec/cases.hpp"
#include "sigrec/core.hpp"
#include "sigrec/dg_field.hpp"
#include "sigrec/elliptic.hpp"
#include "sigrec/measurement.hpp"
#include "sigrec/mesh.hpp"
#include "sigrec/metrics.hpp"
#include "sigrec/quadrature.hpp"
#include "sigrec/reconstruct.hpp"
#include "sigrec/sweep.hpp"
#include "sigrec/transport.hpp"
#include "sigrec/verify.hpp"

#endif
