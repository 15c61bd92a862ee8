#pragma once

// Comparison special functions for the curvature model ODE phi'' + kappa*phi = 0
// and the generalized p-trigonometric functions.  All functions are pure and
// reentrant; queries inside the singularity clearance throw DomainError
// instead of extrapolating.

#include <utility>

namespace eigenbound::compfun {

/// Relative clearance kept from tangent poles and from zeros of c_kl.
inline constexpr double kEpsSing = 1e-9;

/// Sectional-curvature scale (units 1/length^2).
struct Curvature {
    double kappa = 0;
};

/// Lower bound for the boundary second fundamental form (units 1/length).
struct BoundaryConvexity {
    double lambda = 0;
};

/// T_kappa(t): sqrt(k) tan(sqrt(k) t) / 0 / -sqrt(-k) tanh(sqrt(-k) t).
/// Odd in t.  Throws DomainError at or beyond the tangent singularity.
double t_kappa(double kappa, double t);

/// c_kappa(t): cos / 1 / cosh.  Even in t, c_kappa(0) = 1.
double c_kappa(double kappa, double t);

/// Sine analogue of c_kappa: solution of the model ODE with s(0)=0, s'(0)=1.
double s_kappa(double kappa, double t);

/// C_{kappa,lambda}(t) = c_kappa(t) - lambda * s_kappa(t); the solution with
/// initial value 1 and initial slope -lambda.  Requires t >= 0.  Vanishing is
/// legal here; callers validate positivity.
double c_kl(double kappa, double lambda, double t);

/// d/dt of c_kl.
double c_kl_deriv(double kappa, double lambda, double t);

/// T_{kappa,lambda}(t) = -c_kl'(t)/c_kl(t); equals lambda at t = 0.
/// Throws DomainError when c_kl(t) <= kEpsSing.
double t_kl(double kappa, double lambda, double t);

/// First zero of c_kl on t > 0, if any.
/// Closed form per curvature sign; used by domain validation.
struct FirstZero {
    bool exists = false;
    double location = 0;
};
FirstZero c_kl_first_zero(double kappa, double lambda);

/// Half-period constant pi_p = 2*pi / (p * sin(pi/p)); requires p > 1.
double pi_p(double p);

/// Generalized sine u with |u'|^{p-2} u'' = -|u|^{p-2} u, u(0)=0, u'(0)=1.
/// Increasing on [0, pi_p/2] with u(pi_p/2) = 1, u'(pi_p/2) = 0; extended to
/// all real t by oddness, reflection about pi_p/2, and 2*pi_p periodicity.
/// Returns (value, derivative).  Computed by adaptive integration in the
/// flux variable q = |u'|^{p-2} u', with the first integral
/// |u|^p + |u'|^p = 1 monitored per accepted step.
std::pair<double, double> sin_p(double p, double t);

/// First zero of the sin_p derivative, found by forward integration to the
/// flux-zero event without using the half-period formula; cross-validates
/// the integrator against pi_p(p)/2.
double sin_p_quarter_period(double p);

} // namespace eigenbound::compfun
