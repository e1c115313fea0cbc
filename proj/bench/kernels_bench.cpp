// Copyright 2026 The semmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Parallel kernels against their serial references.

#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "semmap/plane_baseline.hpp"
#include "semmap/stereo_matching.hpp"

namespace
{

using namespace semmap;

constexpr int kWidth = 320;
constexpr int kHeight = 240;

struct Pair
{
  GrayImage left{kWidth, kHeight};
  GrayImage right{kWidth, kHeight};
};

const Pair & stereo_pair()
{
  static const Pair pair = [] {
    Pair p;
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (int v = 0; v < kHeight; ++v) {
      for (int x = 0; x < kWidth; ++x) {
        p.right.at(x, v) = u(rng);
      }
      for (int x = 0; x < kWidth; ++x) {
        p.left.at(x, v) = p.right.at(std::max(0, x - 12), v);
      }
    }
    return p;
  }();
  return pair;
}

MatchingParams bench_params()
{
  MatchingParams params;
  params.max_disparity = 64;
  return params;
}

const CostVolume & cost_volume()
{
  static const CostVolume costs =
    sad_cost_volume(stereo_pair().left, stereo_pair().right, bench_params());
  return costs;
}

const std::vector<Eigen::Vector3d> & plane_cloud()
{
  static const std::vector<Eigen::Vector3d> pts = [] {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<Eigen::Vector3d> out;
    for (int i = 0; i < 20000; ++i) {
      const double z = i % 10 < 3 ? u(rng) : noise(rng);
      out.emplace_back(u(rng), u(rng), 0.3 + z);
    }
    return out;
  }();
  return pts;
}

void set_threads(const benchmark::State & state)
{
  omp_set_num_threads(static_cast<int>(state.range(0)));
}

void BM_SadParallel(benchmark::State & state)
{
  set_threads(state);
  const Pair & p = stereo_pair();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sad_cost_volume(p.left, p.right, bench_params()));
  }
}

void BM_SadReference(benchmark::State & state)
{
  const Pair & p = stereo_pair();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::sad_cost_volume(p.left, p.right, bench_params()));
  }
}

void BM_SgmParallel(benchmark::State & state)
{
  set_threads(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgm_aggregate(cost_volume(), bench_params()));
  }
}

void BM_SgmReference(benchmark::State & state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::sgm_aggregate(cost_volume(), bench_params()));
  }
}

void BM_MlesacParallel(benchmark::State & state)
{
  set_threads(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlesac_plane(plane_cloud(), MlesacParams{}));
  }
}

void BM_MlesacReference(benchmark::State & state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::mlesac_plane(plane_cloud(), MlesacParams{}));
  }
}

}  // namespace

BENCHMARK(BM_SadParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SadReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SgmParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SgmReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlesacParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlesacReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
