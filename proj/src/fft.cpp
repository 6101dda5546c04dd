#include "uhpsot/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace uhpsot::fft {
namespace {

// FFTW planning is not thread safe; execution with new-array interfaces is.
// Plans are created with FFTW_UNALIGNED so they stay valid for any buffer.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int ny, int nx, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const Key key{ny, nx, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(ny) * nx);
        fftw_plan plan = fftw_plan_dft_2d(
            ny, nx, reinterpret_cast<fftw_complex*>(scratch.data()),
            reinterpret_cast<fftw_complex*>(scratch.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    using Key = std::tuple<int, int, int>;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

ComplexGrid execute(const ComplexGrid& in, int sign) {
    ComplexGrid out(in.ny, in.nx);
    ComplexGrid tmp = in; // fftw may clobber the input of c2c transforms
    fftw_plan plan = PlanCache::instance().get(in.ny, in.nx, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data.data()),
                     reinterpret_cast<fftw_complex*>(out.data.data()));
    return out;
}

} // namespace

ComplexGrid forward(const std::vector<double>& real, int ny, int nx) {
    ComplexGrid in(ny, nx);
    for (std::size_t i = 0; i < in.data.size(); ++i) in.data[i] = real[i];
    return execute(in, FFTW_FORWARD);
}

ComplexGrid forward(const ComplexGrid& in) { return execute(in, FFTW_FORWARD); }

ComplexGrid inverse(const ComplexGrid& in) {
    ComplexGrid out = execute(in, FFTW_BACKWARD);
    const double norm = 1.0 / (static_cast<double>(in.ny) * in.nx);
    for (auto& v : out.data) v *= norm;
    return out;
}

std::vector<double> inverse_real(const ComplexGrid& in) {
    ComplexGrid out = inverse(in);
    std::vector<double> real(out.data.size());
    for (std::size_t i = 0; i < real.size(); ++i) real[i] = out.data[i].real();
    return real;
}

namespace {
std::vector<double> shift_impl(const std::vector<double>& grid, int ny, int nx, int sy, int sx) {
    std::vector<double> out(grid.size());
    for (int y = 0; y < ny; ++y) {
        const int yy = (y + sy) % ny;
        for (int x = 0; x < nx; ++x) {
            const int xx = (x + sx) % nx;
            out[static_cast<std::size_t>(yy) * nx + xx] = grid[static_cast<std::size_t>(y) * nx + x];
        }
    }
    return out;
}
} // namespace

std::vector<double> fftshift(const std::vector<double>& grid, int ny, int nx) {
    return shift_impl(grid, ny, nx, ny / 2, nx / 2);
}

std::vector<double> ifftshift(const std::vector<double>& grid, int ny, int nx) {
    return shift_impl(grid, ny, nx, ny - ny / 2, nx - nx / 2);
}

} // namespace uhpsot::fft
