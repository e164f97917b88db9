#include "icemest/simd/kernels.hpp"
#include "scalar_impl.hpp"

namespace icemest::simd {

double expit1(double x) { return detail::sk_expit(x); }

namespace detail {

extern const Kernels kScalarTable;
const Kernels kScalarTable = {
    &sk_fill, &sk_sum,      &sk_dot,          &sk_wdot,    &sk_axpy,
    &sk_mul,  &sk_residual, &sk_logit_weight, &sk_expit_n,
};

}  // namespace detail
}  // namespace icemest::simd
