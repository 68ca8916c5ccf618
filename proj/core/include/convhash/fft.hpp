#ifndef CONVHASH_FFT_HPP
#define CONVHASH_FFT_HPP

#include <complex>
#include <vector>

namespace convhash {

/// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

}  // namespace convhash

#endif  // CONVHASH_FFT_HPP
