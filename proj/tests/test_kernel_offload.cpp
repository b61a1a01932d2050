// Copyright 2026 The cxlplan Authors
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

#include "cxlplan/kernel_offload.hpp"

#include "cxlplan/error.hpp"
#include "cxlplan/random.hpp"
#include "doctest.h"

using namespace cxlplan;

namespace {

// Overhead given directly as seconds, split across the three components.
KernelProfile profile(std::string id, double baseline, double device,
                      double overhead) {
  KernelProfile k;
  k.kernel_id = std::move(id);
  k.t_baseline_s = baseline;
  k.t_device_s = device;
  k.alloc_s = overhead * 0.25;
  k.copy_s = overhead * 0.5;
  k.reconstruct_s = overhead * 0.25;
  return k;
}

}  // namespace

TEST_CASE("offload_metrics examples") {
  SUBCASE("platform B indexing") {
    const OffloadMetrics m = offload_metrics(profile("idx", 687, 96.24, 3.76));
    CHECK(m.saving == doctest::Approx(6.87).epsilon(1e-6));
    CHECK(m.overhead_fraction == doctest::Approx(0.0376).epsilon(1e-6));
  }
  SUBCASE("platform A indexing") {
    const OffloadMetrics m = offload_metrics(profile("idx", 174, 98.39, 1.61));
    CHECK(m.saving == doctest::Approx(1.74).epsilon(1e-6));
    CHECK(m.overhead_fraction == doctest::Approx(0.0161).epsilon(1e-6));
  }
  SUBCASE("zero overhead") {
    const OffloadMetrics m = offload_metrics(profile("k", 10, 4, 0));
    CHECK(m.overhead_fraction == 0.0);
    CHECK(m.saving == 2.5);
  }
  SUBCASE("invalid profile") {
    CHECK_THROWS_AS(offload_metrics(profile("k", 0, 4, 0)), Error);
    CHECK_THROWS_AS(offload_metrics(profile("k", 1, -4, 0)), Error);
  }
}

TEST_CASE("make_kernel_profile derives copy time from the platform") {
  const PlatformSpec b = default_platform(PlatformName::kB);
  const KernelProfile k =
      make_kernel_profile("k", 100, 50, 0.5, 161'000'000'000ull, 0.25, b);
  CHECK(k.copy_s == doctest::Approx(1.0));
  CHECK(k.alloc_s == doctest::Approx(0.5 + b.offload_overhead.alloc_s));
  CHECK(k.reconstruct_s == doctest::Approx(0.25 + b.offload_overhead.reconstruct_s));
  CHECK(k.bytes_shared == 161'000'000'000ull);
}

TEST_CASE("offload_decision") {
  CHECK(offload_decision(profile("q10", 704, 94.16, 5.84)) ==
        OffloadDecision::kOffload);
  CHECK(offload_decision(profile("slow", 90, 100, 0)) == OffloadDecision::kStay);
  // saving 3.0 with a 20% overhead share
  CHECK(offload_decision(profile("heavy", 300, 80, 20), 1.0, 0.1) ==
        OffloadDecision::kStay);
  CHECK(offload_decision(profile("heavy", 300, 80, 20), 1.0, 0.25) ==
        OffloadDecision::kOffload);
  CHECK_THROWS_AS(offload_decision(profile("k", 1, 1, 0), 0.0, 0.1), Error);
  CHECK_THROWS_AS(offload_decision(profile("k", 1, 1, 0), 1.0, 1.5), Error);
}

TEST_CASE("kernel profile CSV") {
  const PlatformSpec b = default_platform(PlatformName::kB);
  const auto ks = kernel_profiles_from_csv(
      "kernel_id,t_baseline_s,t_device_s,alloc_s,copy_bytes,reconstruct_s\n"
      "a,10,5,0.1,0,0.2\n",
      "mem", b);
  REQUIRE(ks.size() == 1);
  CHECK(ks[0].kernel_id == "a");
  CHECK(ks[0].copy_s == 0.0);
  CHECK_THROWS_AS(kernel_profiles_from_csv("kernel_id\n", "mem", b), Error);
  CHECK_THROWS_AS(
      kernel_profiles_from_csv(
          "kernel_id,t_baseline_s,t_device_s,alloc_s,copy_bytes,reconstruct_s\n"
          "a,10,5,0.1,-3,0.2\n",
          "mem", b),
      Error);
}

TEST_CASE("property: identity, range, and monotonicity in overhead") {
  SeededDraws draw(606);
  for (int i = 0; i < 500; ++i) {
    KernelProfile k;
    k.kernel_id = "k";
    k.t_baseline_s = draw.uniform_real(1e-3, 1e3);
    k.t_device_s = draw.uniform_real(1e-3, 1e3);
    k.alloc_s = draw.uniform_real(0, 10);
    k.copy_s = draw.uniform_real(0, 10);
    k.reconstruct_s = draw.uniform_real(0, 10);
    const OffloadMetrics m = offload_metrics(k);
    CHECK(std::abs(m.saving * m.t_offload_total_s - k.t_baseline_s) <=
          1e-9 * k.t_baseline_s);
    CHECK(m.overhead_fraction >= 0.0);
    CHECK(m.overhead_fraction < 1.0);

    const double bump = draw.uniform_real(1e-3, 5);
    for (double KernelProfile::*field :
         {&KernelProfile::alloc_s, &KernelProfile::copy_s,
          &KernelProfile::reconstruct_s}) {
      KernelProfile more = k;
      more.*field += bump;
      CHECK(offload_metrics(more).saving < m.saving);
    }
  }
  // Overhead share vanishes with the shared bytes when nothing else is paid.
  PlatformSpec b = default_platform(PlatformName::kB);
  b.offload_overhead.alloc_s = 0.0;
  b.offload_overhead.reconstruct_s = 0.0;
  double previous = 1.0;
  for (Bytes bytes : {1'000'000'000'000ull, 1'000'000'000ull, 1'000'000ull, 0ull}) {
    const double f =
        offload_metrics(make_kernel_profile("k", 10, 5, 0, bytes, 0, b)).overhead_fraction;
    CHECK(f < previous);
    previous = f;
  }
  CHECK(previous == 0.0);
}
