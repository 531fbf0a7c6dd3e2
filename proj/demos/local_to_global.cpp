// Decomposes K_6 into its twenty triangles and certifies the spectral bound
// lambda(G) <= gamma + lambda_2^2 (1 - gamma).

#include <cstdio>
#include <iostream>

#include "hdx/report.hpp"
#include "hdx/spectral.hpp"

int main() {
    const auto g = hdx::WeightedGraph::complete(6);

    hdx::LocalDecomposition tau;
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a + 1; b < 6; ++b)
            for (std::size_t c = b + 1; c < 6; ++c) {
                hdx::DecompositionPart part;
                part.graph = hdx::WeightedGraph::complete(3);
                part.to_ambient = {a, b, c};
                tau.parts.push_back(std::move(part));
                tau.part_weight.push_back(1.0);
            }

    const auto rep = hdx::local_to_global_check(g, tau);
    std::printf("parts      : %zu\n", tau.parts.size());
    std::printf("mixture err: %.3g\n", rep.mixture_error);
    std::printf("gamma      : %.9f\n", rep.gamma);
    std::printf("lambda2    : %.9f\n", rep.lambda2);
    std::printf("bound      : %.9f\n", rep.bound);
    std::printf("actual     : %.9f\n", rep.actual);
    std::printf("holds      : %s\n", rep.holds ? "yes" : "no");

    const auto spectral = hdx::second_eigenvalue(g);
    std::cout << hdx::spectral_report_json(spectral).dump(2) << "\n";
    return rep.holds ? 0 : 1;
}
