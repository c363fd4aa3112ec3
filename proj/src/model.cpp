#include "mfsi/model.hpp"

#include <cmath>

namespace mfsi {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::NonFinite, name);
}

} // namespace

ModelParams ModelParams::validate(double alpha, double sigma, double beta1,
                                  double beta2, double mu1, double mu2,
                                  bool checked_rates) {
    require_finite(alpha, "alpha");
    require_finite(sigma, "sigma");
    require_finite(beta1, "beta1");
    require_finite(beta2, "beta2");
    require_finite(mu1, "mu1");
    require_finite(mu2, "mu2");

    if (alpha <= 0.0 || alpha > 1.0)
        throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1]");
    if (sigma < 0.0 || sigma > 1.0)
        throw Error(ErrorCode::FieldOutOfRange, "sigma must lie in [0, 1]");
    if (beta1 < 0.0 || beta1 > 1.0)
        throw Error(ErrorCode::FieldOutOfRange, "beta1 must lie in [0, 1]");
    if (beta2 < 0.0 || beta2 > 1.0)
        throw Error(ErrorCode::FieldOutOfRange, "beta2 must lie in [0, 1]");
    if (mu1 < 0.0 || (checked_rates && mu1 > 1.0))
        throw Error(ErrorCode::FieldOutOfRange,
                    checked_rates ? "mu1 must lie in [0, 1] (pass unchecked rates to lift the cap)"
                                  : "mu1 must be >= 0");
    if (mu2 < 0.0 || (checked_rates && mu2 > 1.0))
        throw Error(ErrorCode::FieldOutOfRange,
                    checked_rates ? "mu2 must lie in [0, 1] (pass unchecked rates to lift the cap)"
                                  : "mu2 must be >= 0");

    return ModelParams{alpha, sigma, beta1, beta2, mu1, mu2, (1.0 - alpha) / alpha};
}

// The two interaction terms differ only in sign, so they are computed once.
// This keeps ds+di free of any beta contribution up to one rounding each and
// makes the role-swap mirror exact apart from the 1-(1-sigma) path.
VectorFieldValue vector_field(const ModelParams& p, const State& x) {
    const double sum = x.s + x.i;
    const double transfer = (p.beta1 - p.beta2) * (x.s * x.i);
    const double ds = p.sigma * p.k * sum - transfer - p.mu1 * x.s;
    const double di = (1.0 - p.sigma) * p.k * sum + transfer - p.mu2 * x.i;
    return {ds, di};
}

Jacobian jacobian(const ModelParams& p, const State& x) {
    const double d = p.beta2 - p.beta1;
    return {{{p.sigma * p.k + d * x.i - p.mu1, p.sigma * p.k + d * x.s},
             {(1.0 - p.sigma) * p.k - d * x.i,
              (1.0 - p.sigma) * p.k - d * x.s - p.mu2}}};
}

double population(const ModelParams& p, const State& x) {
    return (x.s + x.i) / p.alpha;
}

double portfolio_at_risk(const State& x) {
    const double sum = x.s + x.i;
    if (sum == 0.0)
        throw Error(ErrorCode::DegeneratePopulation, "s + i = 0");
    return x.i / sum;
}

ModelParams swap_roles(const ModelParams& p) {
    ModelParams q = p;
    q.sigma = 1.0 - p.sigma;
    q.beta1 = p.beta2;
    q.beta2 = p.beta1;
    q.mu1 = p.mu2;
    q.mu2 = p.mu1;
    return q;
}

State swap_roles(const State& x) {
    return {x.i, x.s};
}

} // namespace mfsi
