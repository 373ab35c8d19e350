#pragma once

// Coefficients of W. J. Cody's rational Chebyshev approximations for erf and
// erfc (Math. Comp. 23, 1969, 631-638; netlib specfun CALERF). The rational
// forms approximate erf/erfc to at least 18 significant digits in exact
// arithmetic; in IEEE double the error is a few ulps.
//
// Kept free of standard-library includes so the vector kernel translation
// units can share it without pulling in templates compiled for a wider ISA.

namespace bai::cody {

// erf(y) = y * P(y^2)/Q(y^2) for |y| <= kThreshSmall
inline constexpr double kA[5] = {3.1611237438705656, 113.864154151050156,
                                 377.485237685302021, 3209.37758913846947,
                                 .185777706184603153};
inline constexpr double kB[4] = {23.6012909523441209, 244.024637934444173,
                                 1282.61652607737228, 2844.23683343917062};

// erfc(y) = exp(-y^2) * P(y)/Q(y) for kThreshSmall < y <= 4
inline constexpr double kC[9] = {.564188496988670089, 8.88314979438837594,
                                 66.1191906371416295, 298.635138197400131,
                                 881.95222124176909,  1712.04761263407058,
                                 2051.07837782607147, 1230.33935479799725,
                                 2.15311535474403846e-8};
inline constexpr double kD[8] = {15.7449261107098347, 117.693950891312499,
                                 537.181101862009858, 1621.38957456669019,
                                 3290.79923573345963, 4362.61909014324716,
                                 3439.36767414372164, 1230.33935480374942};

// erfc(y) = exp(-y^2)/y * (1/sqrt(pi) - R(1/y^2)) for y > 4
inline constexpr double kP[6] = {.305326634961232344, .360344899949804439,
                                 .125781726111229246, .0160837851487422766,
                                 6.58749161529837803e-4, .0163153871373020978};
inline constexpr double kQ[5] = {2.56852019228982242, 1.87295284992346047,
                                 .527905102951428412, .0605183413124413191,
                                 .00233520497626869185};

inline constexpr double kSqrtPiInv = 0.56418958354775628695;
inline constexpr double kThreshSmall = 0.46875;
inline constexpr double kThreshMid = 4.0;
// erfc(y) underflows to zero beyond this.
inline constexpr double kXBig = 26.543;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace bai::cody
