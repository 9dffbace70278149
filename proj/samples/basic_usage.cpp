// Two-matrix means, a divergence and a three-matrix barycenter.

#include "opmean/opmean.hpp"

#include <cstdio>

int main()
{
    using namespace opmean;

    random::Engine rng(7);
    const PDMatrix a = random::pd(3, rng);
    const PDMatrix b = random::pd(3, rng);
    const PDMatrix c = random::pd(3, rng);

    for (const MeanDescriptor& sigma : builtin_means()) {
        const PDMatrix m = mean_apply(sigma, a, b);
        std::printf("%-12s tr(A sigma B) = %.6f  phi(A, B) = %s\n", sigma.name().c_str(), m.hermitian().trace(),
                    phi(sigma, a, b).to_string().c_str());
    }

    const std::vector<PDMatrix> mats{a, b, c};
    const WeightVector w({0.5, 0.3, 0.2});
    for (const char* name : {"geometric", "logarithmic"}) {
        const SolveReport r = solve_barycenter(mean_by_name(name), mats, w);
        std::printf("%-12s barycenter: %d iterations, |grad| = %.2e, tr X = %.6f\n", name, r.iterations,
                    r.final_grad_norm, r.X.hermitian().trace());
    }
    const PDMatrix closed = geometric_closed_form(mats, w);
    std::printf("geometric closed form: tr = %.6f\n", closed.hermitian().trace());
    return 0;
}
