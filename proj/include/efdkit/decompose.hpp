#pragma once

#include <cstddef>

#include "efdkit/efd.hpp"
#include "efdkit/ewt.hpp"
#include "efdkit/fdm.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/signal.hpp"

namespace efdkit {

struct DecomposeOptions {
  Method method = Method::Efd;
  std::size_t n_modes = 1;  // ignored by the FDM scans
  BoundaryMode boundary = BoundaryMode::Periodic;  // EFD/EWT only
  double tol_if = kDefaultTolIf;  // FDM only
};

inline ModeSet decompose(const Signal& signal, const DecomposeOptions& opt) {
  switch (opt.method) {
    case Method::Efd: return efd_decompose(signal, opt.n_modes, opt.boundary);
    case Method::EwtMaxima:
      return ewt_decompose(signal, opt.n_modes, SegmentationTechnique::LocalMaxima, opt.boundary);
    case Method::EwtMinima:
      return ewt_decompose(signal, opt.n_modes, SegmentationTechnique::LowestMinima, opt.boundary);
    case Method::FdmLth: return to_mode_set(fdm_lth(signal, opt.tol_if), signal);
    case Method::FdmHtl: return to_mode_set(fdm_htl(signal, opt.tol_if), signal);
  }
  throw InvalidInput("unknown method");
}

}  // namespace efdkit
