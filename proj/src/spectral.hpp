#ifndef SQZ_SRC_SPECTRAL_HPP
#define SQZ_SRC_SPECTRAL_HPP

#include <fftw3.h>

#include <cstddef>
#include <span>
#include <vector>

#include "sqz/grid.hpp"

namespace sqz::detail {

/// Complex 1-D FFT pair of fixed length. Plans are made with FFTW_ESTIMATE so
/// results are bitwise reproducible run to run; planning is serialized
/// internally because the FFTW planner is not thread-safe.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&& other) noexcept;

    std::size_t size() const noexcept { return n_; }
    /// Unnormalized forward transform, in place allowed.
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    /// Unnormalized backward transform (forward then backward scales by n).
    void backward(std::span<const cplx> in, std::span<cplx> out) const;

private:
    std::size_t n_ = 0;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// DST-I of the real and imaginary parts of a complex vector of length m,
/// i.e. a sine expansion with nodes vanishing at both ends of an (m+1)-cell
/// interval. Applying it twice scales by 2 (m + 1).
class SineTransform {
public:
    explicit SineTransform(std::size_t m);
    ~SineTransform();
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;
    SineTransform(SineTransform&& other) noexcept;
    SineTransform& operator=(SineTransform&& other) noexcept;

    std::size_t size() const noexcept { return m_; }
    void apply(std::span<const cplx> in, std::span<cplx> out) const;

private:
    std::size_t m_ = 0;
    fftw_plan plan_ = nullptr;
};

/// Angular wavenumbers of the periodic FFT on n points of spacing h; the
/// Nyquist entry is kept (sign +) and callers zero it for odd derivatives.
std::vector<double> fft_wavenumbers(std::size_t n, double h);

/// Spectral first and second derivatives on the periodic extension of a grid.
class SpectralDerivative {
public:
    SpectralDerivative(std::size_t n, double h);

    void first(std::span<const cplx> f, std::span<cplx> out);
    void second(std::span<const cplx> f, std::span<cplx> out);

private:
    Fft fft_;
    std::vector<double> k_;
    std::vector<cplx> buf_;
};

}  // namespace sqz::detail

#endif
