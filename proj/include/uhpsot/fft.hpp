#pragma once

#include <complex>
#include <vector>

namespace uhpsot::fft {

/// Complex 2-D grid, row-major (ny rows, nx columns).
struct ComplexGrid {
    int ny = 0;
    int nx = 0;
    std::vector<std::complex<double>> data;

    ComplexGrid() = default;
    ComplexGrid(int ny, int nx)
        : ny(ny), nx(nx), data(static_cast<std::size_t>(ny) * nx) {}

    std::complex<double>& at(int y, int x) { return data[static_cast<std::size_t>(y) * nx + x]; }
    const std::complex<double>& at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * nx + x];
    }
};

/// Unnormalized forward DFT of a real row-major grid.
ComplexGrid forward(const std::vector<double>& real, int ny, int nx);
ComplexGrid forward(const ComplexGrid& in);

/// Inverse DFT including the 1/(ny*nx) normalization.
ComplexGrid inverse(const ComplexGrid& in);

/// Inverse DFT, returning the real part only (input assumed conjugate symmetric).
std::vector<double> inverse_real(const ComplexGrid& in);

/// Move the (0,0) sample to the grid center (ny/2, nx/2).
std::vector<double> fftshift(const std::vector<double>& grid, int ny, int nx);

/// Inverse of fftshift; for odd sizes the two differ.
std::vector<double> ifftshift(const std::vector<double>& grid, int ny, int nx);

} // namespace uhpsot::fft
