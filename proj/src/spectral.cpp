#include "spectral.hpp"

#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace sqz::detail {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(const cplx* p)
{
    // fftw_execute_dft takes non-const input; FFTW_UNALIGNED plans never write
    // to the input of an out-of-place transform.
    return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n)
{
    std::vector<cplx> a(n), b(n);
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    if (fwd_ == nullptr || bwd_ == nullptr) {
        throw std::runtime_error("FFTW planning failed");
    }
}

Fft::~Fft()
{
    if (fwd_ == nullptr && bwd_ == nullptr) {
        return;
    }
    std::lock_guard lock(planner_mutex());
    if (fwd_ != nullptr) {
        fftw_destroy_plan(fwd_);
    }
    if (bwd_ != nullptr) {
        fftw_destroy_plan(bwd_);
    }
}

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_), fwd_(std::exchange(other.fwd_, nullptr)), bwd_(std::exchange(other.bwd_, nullptr))
{
}

Fft& Fft::operator=(Fft&& other) noexcept
{
    std::swap(n_, other.n_);
    std::swap(fwd_, other.fwd_);
    std::swap(bwd_, other.bwd_);
    return *this;
}

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) const
{
    fftw_execute_dft(fwd_, as_fftw(in.data()), as_fftw(out.data()));
}

void Fft::backward(std::span<const cplx> in, std::span<cplx> out) const
{
    fftw_execute_dft(bwd_, as_fftw(in.data()), as_fftw(out.data()));
}

SineTransform::SineTransform(std::size_t m) : m_(m)
{
    std::vector<cplx> a(m), b(m);
    const int len = static_cast<int>(m);
    const fftw_r2r_kind kind = FFTW_RODFT00;
    auto* in = reinterpret_cast<double*>(a.data());
    auto* out = reinterpret_cast<double*>(b.data());
    std::lock_guard lock(planner_mutex());
    // Two interleaved real transforms (re, im) with stride 2.
    plan_ = fftw_plan_many_r2r(1, &len, 2, in, nullptr, 2, 1, out, nullptr, 2, 1, &kind,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) {
        throw std::runtime_error("FFTW planning failed");
    }
}

SineTransform::~SineTransform()
{
    if (plan_ != nullptr) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
}

SineTransform::SineTransform(SineTransform&& other) noexcept
    : m_(other.m_), plan_(std::exchange(other.plan_, nullptr))
{
}

SineTransform& SineTransform::operator=(SineTransform&& other) noexcept
{
    std::swap(m_, other.m_);
    std::swap(plan_, other.plan_);
    return *this;
}

void SineTransform::apply(std::span<const cplx> in, std::span<cplx> out) const
{
    fftw_execute_r2r(plan_, reinterpret_cast<double*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<double*>(out.data()));
}

std::vector<double> fft_wavenumbers(std::size_t n, double h)
{
    std::vector<double> k(n);
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
    for (std::size_t m = 0; m < n; ++m) {
        const auto signed_m = m <= n / 2 ? static_cast<double>(m)
                                         : static_cast<double>(m) - static_cast<double>(n);
        k[m] = dk * signed_m;
    }
    return k;
}

SpectralDerivative::SpectralDerivative(std::size_t n, double h)
    : fft_(n), k_(fft_wavenumbers(n, h)), buf_(n)
{
}

void SpectralDerivative::first(std::span<const cplx> f, std::span<cplx> out)
{
    const std::size_t n = fft_.size();
    fft_.forward(f, buf_);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        buf_[m] *= cplx(0.0, k_[m] * scale);
    }
    if (n % 2 == 0) {
        buf_[n / 2] = 0.0;
    }
    fft_.backward(buf_, out);
}

void SpectralDerivative::second(std::span<const cplx> f, std::span<cplx> out)
{
    const std::size_t n = fft_.size();
    fft_.forward(f, buf_);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        buf_[m] *= -k_[m] * k_[m] * scale;
    }
    fft_.backward(buf_, out);
}

}  // namespace sqz::detail
