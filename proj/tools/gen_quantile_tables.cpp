// Writes the McCulloch quantile-ratio tables used by estimate_mcculloch.
// Every entry is computed from the library's own S0 cdf, so the tables agree
// with the parameterization the rest of the code uses.

#include "stablebelief/stable.hpp"

#include <cstdio>
#include <vector>

int main(int argc, char** argv) {
    const char* path = argc > 1 ? argv[1] : "quantile_tables.inc";
    std::vector<double> alphas;
    for (int i = 0; i <= 24; ++i) alphas.push_back(0.6 + 0.05 * i);  // 0.6 .. 1.8
    for (double a : {1.85, 1.9, 1.93, 1.96, 1.98, 1.99, 2.0}) alphas.push_back(a);
    std::vector<double> betas;
    for (int j = 0; j <= 10; ++j) betas.push_back(0.1 * j);

    std::FILE* f = std::fopen(path, "w");
    if (!f) {
        std::perror(path);
        return 1;
    }
    std::fprintf(f, "// Generated by gen_quantile_tables; do not edit.\n");
    std::fprintf(f, "// Columns: nu_alpha, nu_beta, q75-q25, q50 of the standardized S0 law.\n");
    std::fprintf(f, "constexpr int kTableAlphaCount = %zu;\n", alphas.size());
    std::fprintf(f, "constexpr int kTableBetaCount = %zu;\n", betas.size());
    std::fprintf(f, "constexpr double kTableAlpha[kTableAlphaCount] = {");
    for (std::size_t i = 0; i < alphas.size(); ++i) std::fprintf(f, "%s%.4g", i ? ", " : "", alphas[i]);
    std::fprintf(f, "};\n");
    std::fprintf(f, "constexpr double kTableBeta[kTableBetaCount] = {");
    for (std::size_t j = 0; j < betas.size(); ++j) std::fprintf(f, "%s%.4g", j ? ", " : "", betas[j]);
    std::fprintf(f, "};\n");
    std::fprintf(f, "constexpr double kQuantileTable[kTableAlphaCount][kTableBetaCount][4] = {\n");
    for (double a : alphas) {
        std::fprintf(f, "    {");
        for (std::size_t j = 0; j < betas.size(); ++j) {
            const sb::StableParams p{a, betas[j], 1.0, 0.0};
            const double q05 = sb::quantile(p, 0.05);
            const double q25 = sb::quantile(p, 0.25);
            const double q50 = sb::quantile(p, 0.50);
            const double q75 = sb::quantile(p, 0.75);
            const double q95 = sb::quantile(p, 0.95);
            std::fprintf(f, "%s{%.12g, %.12g, %.12g, %.12g}", j ? ",\n     " : "", (q95 - q05) / (q75 - q25),
                         (q95 + q05 - 2.0 * q50) / (q95 - q05), q75 - q25, q50);
        }
        std::fprintf(f, "},\n");
        std::fprintf(stderr, "alpha %.3g done\n", a);
    }
    std::fprintf(f, "};\n");
    std::fclose(f);
    return 0;
}
