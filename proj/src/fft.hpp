#pragma once

#include <span>

#include "fbl/spectral.hpp"

namespace fbl::detail {

// Real-to-half-complex transforms backed by FFTW.  Plans are created once per
// size under a lock and executed through the new-array interface, which is
// safe to call concurrently.

/// out[k] = sum_j in[j] exp(-2 pi i j k / N), k = 0..N/2.
void forward_real(std::span<const double> in, std::span<Complex> out);

/// out[j] = (1/N) sum_k in[k] exp(2 pi i j k / N) over the full Hermitian
/// extension of the half spectrum.
void inverse_real(std::span<const Complex> in, std::span<double> out);

}  // namespace fbl::detail
