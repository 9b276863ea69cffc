#pragma once

// Frozen output of tests/oracles/compute_oracles.py (mpmath, 50 digits),
// rounded to 20 significant digits.

#include <array>
#include <utility>

namespace oracle {

inline constexpr std::array<std::pair<double, double>, 20> kLogGamma = {{
    {0.001, 6.9071788853838536825},   {0.1, 2.2527126517342059599},
    {0.5, 0.57236494292470008707},    {1.0, 0.0},
    {1.5, -0.12078223763524522235},   {2.0, 0.0},
    {2.5, 0.28468287047291915963},    {3.25, 0.93580193110872535826},
    {4.75, 2.8085714185757365027},    {7.0, 6.5792512120101009951},
    {10.5, 13.940625219403763633},    {15.3, 25.99660624196418343},
    {22.2, 45.994694701877164831},    {33.3, 82.603723581654952928},
    {50.0, 144.56574394634488601},    {71.9, 234.27482284439313864},
    {99.99, 359.08820425357318608},   {120.5, 455.41760044623451043},
    {150.25, 601.26150403249972598},  {170.0, 701.43726380873708535},
}};

inline constexpr double kGammaHalf = 1.7724538509055160273;
inline constexpr double kBetaHalfHalf = 3.1415926535897932385;

// x = 2, alpha = 0.5
inline constexpr std::array<double, 4> kWendelChain = {1.2247448713915890491, 1.2649110640673517328,
                                                       1.3293403881791370205, 1.4142135623730950488};
// x = 0.5, y = 11
inline constexpr std::array<double, 4> kBetaChain = {0.53441494378855711228, 0.54052036714575414266,
                                                     0.54699113369586263371, 0.61721339984836764104};

// p=2, u=0, v=1, l=(1,1), M=1e4, B=b=1
inline constexpr double kGenFine = 0.60480487266758607417;
inline constexpr double kGenCoarse = 3.7112229578319452739;
// p=1, u=0, v=1, l=(2,3,1), b=1, B=2, K=1000
inline constexpr double kOptFine = 300.95442290047553693;
inline constexpr double kOptCoarse = 412.59120013387869031;
// p=3, L=2, beta-alpha=1.5, dim=2, K=50
inline constexpr double kMmcFine = 0.51961524227066318806;
inline constexpr double kMmcCoarse = 1.2727922061357855439;

// d=1, L=1, l=(1,8,1), a=0, b=1, u=0, v=1, c=B=2, M=K=1e6, p=2, A=2
inline constexpr double kMainApprox = 2.25;
inline constexpr double kMainOpt = 9520.4604120084366107;
inline constexpr double kMainGen = 47.532016577805632192;
inline constexpr double kMainTotal = 9570.2424285862422429;
inline constexpr double kMainCoarseApprox = 144.0;
inline constexpr double kMainCoarseOpt = 19040.920824016873221;
inline constexpr double kMainCoarseGen = 441.6207387117990825;

// d=1, l=(1,4,1), c=2, M=K=1e4
inline constexpr double kIntroApprox = 4.0;
inline constexpr double kIntroGen = 81.682722975809461889;
inline constexpr double kIntroOpt = 364.80433574236389685;

inline constexpr double kLn3 = 1.0986122886681096914;
inline constexpr double k23Over18 = 1.2777777777777777778;

// E[min_k ||Theta_k - centre||_inf] on [0,1]^D with centre at the midpoint.
inline constexpr std::array<double, 4> kMmcExactD1 = {0.045454545454545454545, 0.004950495049504950495,
                                                      0.0004995004995004995005, 0.000049995000499950005};
inline constexpr std::array<double, 4> kMmcExactD2 = {0.13513009178643853566, 0.044146039658782839277,
                                                      0.01400722609710544881, 0.004430968468369373153};

inline constexpr double kL2HalfVsIdentity = 1.0 / 12.0;
inline constexpr double kUniformCentralL4 = 0.334370152488211012;

}  // namespace oracle
