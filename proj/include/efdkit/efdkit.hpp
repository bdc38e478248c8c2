#pragma once

#include <string_view>

#include "efdkit/benchkit.hpp"
#include "efdkit/decompose.hpp"
#include "efdkit/efd.hpp"
#include "efdkit/errors.hpp"
#include "efdkit/ewt.hpp"
#include "efdkit/fdm.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/segmentation.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/spectral.hpp"
#include "efdkit/tfr.hpp"

namespace efdkit {
inline constexpr std::string_view kVersion = "0.1.0";
}  // namespace efdkit
