#include "fimsar/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace fimsar::fft {
namespace {

std::mutex g_plan_mutex;

fftw_plan plan_for(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto* a = fftw_alloc_complex(n);
    auto* b = fftw_alloc_complex(n);
    // FFTW_ESTIMATE keeps plan choice independent of timing, so results are reproducible.
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    if (!p) fail_runtime("FFT plan creation failed for length " + std::to_string(n));
    cache.emplace(key, p);
    return p;
}

void run(const Complex* in, Complex* out, std::size_t n, int sign) {
    if (n == 0) return;
    fftw_plan p = plan_for(n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(const Complex* in, Complex* out, std::size_t n) { run(in, out, n, FFTW_FORWARD); }
void backward(const Complex* in, Complex* out, std::size_t n) { run(in, out, n, FFTW_BACKWARD); }

CVector forward(const CVector& in) {
    CVector out(in.size());
    forward(in.data(), out.data(), in.size());
    return out;
}

CVector backward(const CVector& in) {
    CVector out(in.size());
    backward(in.data(), out.data(), in.size());
    return out;
}

std::size_t smooth_size(std::size_t min_n, std::size_t multiple) {
    if (multiple == 0) multiple = 1;
    std::size_t n = ((min_n + multiple - 1) / multiple) * multiple;
    if (n == 0) n = multiple;
    for (;; n += multiple) {
        std::size_t r = n;
        for (std::size_t f : {2u, 3u, 5u, 7u})
            while (r % f == 0) r /= f;
        if (r == 1) return n;
    }
}

}  // namespace fimsar::fft
