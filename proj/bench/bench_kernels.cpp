// Serial vs OpenMP timings for the superoperator kernels.
//
//   bench_kernels [d] [kraus] [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "qmarkov/kernels.hpp"

using namespace qmarkov;
using clk = std::chrono::steady_clock;

namespace {

Mat random_mat(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

template <typename F>
double time_ms(int reps, F&& f) {
  const auto t0 = clk::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const int d = argc > 1 ? std::atoi(argv[1]) : 12;
  const int m = argc > 2 ? std::atoi(argv[2]) : 8;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 5;
  std::mt19937_64 rng(7);
  std::vector<Mat> ks;
  for (int k = 0; k < m; ++k) ks.push_back(random_mat(d, rng));
  std::vector<Mat> xs;
  for (int k = 0; k < 4 * d; ++k) xs.push_back(random_mat(d, rng));

  const Mat s = kernels::superop_from_kraus_serial(ks);
  const Mat c = kernels::choi_from_superop_serial(s, d);
  volatile double sink = 0.0;

  std::printf("d=%d kraus=%d reps=%d\n", d, m, reps);
  std::printf("%-22s %12s %12s %8s\n", "kernel", "serial ms", "omp ms", "max diff");

  auto row = [&](const char* name, auto serial, auto parallel, double diff) {
    const double ts = time_ms(reps, serial);
    const double tp = time_ms(reps, parallel);
    std::printf("%-22s %12.3f %12.3f %8.1e\n", name, ts, tp, diff);
  };

  row("superop_from_kraus", [&] { sink = sink + kernels::superop_from_kraus_serial(ks).norm(); },
      [&] { sink = sink + kernels::superop_from_kraus_parallel(ks).norm(); },
      (kernels::superop_from_kraus_serial(ks) - kernels::superop_from_kraus_parallel(ks)).norm());
  row("choi_from_superop", [&] { sink = sink + kernels::choi_from_superop_serial(s, d).norm(); },
      [&] { sink = sink + kernels::choi_from_superop_parallel(s, d).norm(); },
      (kernels::choi_from_superop_serial(s, d) - kernels::choi_from_superop_parallel(s, d)).norm());
  row("superop_from_choi", [&] { sink = sink + kernels::superop_from_choi_serial(c, d).norm(); },
      [&] { sink = sink + kernels::superop_from_choi_parallel(c, d).norm(); },
      (kernels::superop_from_choi_serial(c, d) - kernels::superop_from_choi_parallel(c, d)).norm());
  row("apply_many", [&] { sink = sink + kernels::apply_many_serial(s, xs).size(); },
      [&] { sink = sink + kernels::apply_many_parallel(s, xs).size(); }, [&] {
        const auto a = kernels::apply_many_serial(s, xs);
        const auto b = kernels::apply_many_parallel(s, xs);
        double w = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) w = std::max(w, (a[k] - b[k]).norm());
        return w;
      }());
  row("gram", [&] { sink = sink + kernels::gram_serial(xs).norm(); },
      [&] { sink = sink + kernels::gram_parallel(xs).norm(); },
      (kernels::gram_serial(xs) - kernels::gram_parallel(xs)).norm());
  return 0;
}
