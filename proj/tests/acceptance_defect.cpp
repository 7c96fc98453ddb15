// The toy non-degeneracy claim e(P, P) != 1 at (p = 11, q = 3) cannot hold
// for the pairing built from the cube-root distortion map: 3 | p + 1 forces
// the order-3 subgroup to be {O, (0, 1), (0, -1)}, and (x, y) -> (zeta x, y)
// fixes x = 0 pointwise, so the distorted argument never leaves the span of
// the first.  The check is implemented as stated and is expected to fail;
// ctest registers this binary with WILL_FAIL.

#include "test_util.hpp"

#include "wsnkm/pairing.hpp"

using namespace wsnkm;

namespace {

struct Reporter {
    ~Reporter() {
        std::printf("[%s] criterion 1 (toy non-degeneracy): e(P,P) != 1 at p=11, q=3 -- "
                    "unattainable, the distortion map fixes the x=0 subgroup\n",
                    passed ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
    bool passed = false;
};

} // namespace

TEST_CASE("criterion 1 toy case: e(P, P) != 1 at p = 11, q = 3", "[acceptance][defect]") {
    Reporter r;
    CurveContext ctx = setup_curve(11, 3, 42);
    Fp2Element value = modified_pairing(ctx.generator, ctx.generator, ctx);
    REQUIRE(value != Fp2Element::one(11));
    r.passed = true;
}
