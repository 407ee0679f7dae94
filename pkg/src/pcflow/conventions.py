"""Conventions sheet: every sign and factor convention used across the package.

All tensor identities checked by the test suite interlock, so the constants
below form one coherent system.  Changing any single entry breaks at least one
cross-module residual test.  The choices:

Complex structure and coordinates
    z^i = x_i + i y_i on the square torus (R / 2pi Z)^{2n}.  Holomorphic and
    antiholomorphic derivatives are the Wirtinger operators
    d_i = (d/dx_i - i d/dy_i)/2 and d_ibar = (d/dx_i + i d/dy_i)/2.
    Real axes are ordered (x_1..x_n, y_1..y_n).

Hermitian metric and its 2-form
    The metric is the Hermitian matrix field g[i,j] ~ g_{i jbar}; the
    associated 2-form is w = i g_{i jbar} dz^i ^ dzbar^j.  Every real (1,1)
    form is stored the same way: a Hermitian coefficient matrix phi[i,j] with
    the form equal to i phi_{i jbar} dz^i ^ dzbar^j.

Riemannian metric
    g_real(X, Y) := w(X, JY).  In block form over (x, y) axes this is
    2*[[Re g, Im g], [-Im g, Re g]].  The flat Hermitian identity therefore
    has g_real = 2*I.  All Riemannian quantities (Levi-Civita curvature,
    Hodge star, norms of real tensors) use g_real with no extra factors.

Volume element
    dV = det(g[i,j]) dx dy, so the flat torus has volume (2pi)^{2n}.  This is
    2^{-n} times the Riemannian volume det(g_real)^{1/2} dx dy and 2^{-n}
    times w^n/n!.  The constant offset is harmless: it cancels in every
    normalized functional (lambda, entropies, conjugate-heat mass).

Chern torsion
    T[k,m,q] ~ T_{k m qbar} = d_k g_{m qbar} - d_m g_{k qbar}, antisymmetric
    in (k, m).  The torsion 3-form is T3 = i(dbar - d)w, stored with real
    components over real axes.  Pointwise, |T3|^2_{g_real} = 6 * tr_g Q1
    (checked numerically in the tests).

Curvature normalization (the load-bearing one)
    S[k,l]  = g^{i jbar}(-g_{k lbar, i jbar} + g^{m nbar} g_{k nbar, i}
              g_{lbar m, jbar})   (trace of the Chern curvature),
    Q1[k,l] = g^{m nbar} g^{p qbar} T_{k m qbar} conj(T_{l n pbar}),
    P11     = (S - Q1) / 2.
    The factor 1/2 is forced: with the codifferential coordinate formula
    below and ricci_form = -(i/2) ddbar log det g, the decomposition
    P11 = ricci_form - [d(d*w)]^{(1,1)} holds exactly on pluriclosed data,
    and on Kahler data the flow dw/dt = -P11 reduces to
    dw/dt = (i/2) ddbar log det g.  The unhalved combination S - Q1 fails
    both checks by a factor of 2.

Codifferential of w
    (d*w)^{(0,1)}_j = (i/2) g^{p qbar} (d_qbar g_{p jbar} - d_jbar g_{p qbar});
    the (1,0) part is its conjugate.  This equals HALF of the honest
    g_real-codifferential of the 2-form w:  delta_real(w) = 2 * d*w.
    (DSTAR_TO_CODIFF below; verified to round-off in the tests.)

Lee form
    theta = -J(delta_real w) with (J alpha)(X) := alpha(JX), i.e.
    theta^{(0,1)} = LEE_SIGN * i * delta_real(w)^{(0,1)}.  LEE_SIGN = +1 is
    pinned by two independent checks: dw = theta ^ w on Hermitian surfaces,
    and the curvature decomposition of dg_real/dt into
    -Ricci + H/4 - Lie_theta(g_real)/2.

Norm conventions
    Complex (p,q) tensors: full index-tuple contraction with g / g^{-1}, no
    factorial.  Real tensors: full contraction with g_real^{-1}.  The squared
    norm of a (0,1) form beta used by the volume-rate identity is
    2 g^{k lbar} beta_l conj(beta_k), which equals the g_real-norm of the
    real 1-form beta + conj(beta).

Laplacians
    Canonical (complex) Laplacian: lap_c f = g^{k lbar} d_k d_lbar f.
    Laplace-Beltrami: lap_b f = (1/rho) d_a (rho g_real^{ab} d_b f) with
    rho = det g (the constant 2^n drops out).  On Kahler data
    lap_b = 2 lap_c on scalars.

Schrodinger reformulation of the energy infimum
    lambda(g, T3) is the smallest eigenvalue of -4 lap_b + (R - |T3|^2/12)
    on L^2(dV); the substitution u = e^{-f/2} maps the constrained energy
    to the Rayleigh quotient.  Validated against direct minimization.

Expanding entropy bookkeeping
    wplus(g, T3, u, sigma) integrates
    sigma(|grad u|^2/u + R u - |T3|^2 u / 12) + u log u.  The monotone
    entropy along the flow is wplus + (d/2) log(4 pi sigma) + d with
    d = 2n the real dimension, evaluated with the entropy clock
    sigma(t) = sigma0 + (t - t0)/4; the conjugate density obeys
    du/dt = -lap_b(u)/4 + R u / 4 (mass-conserving in divergence form).

Flow speed dictionary
    The Riemannian combination -Rc + H/4 - Lie_theta(g_real)/2 equals
    2 * real_tensor(P11) (GAUGE_TENSOR_FACTOR), so the metric flow
    dg_real/dt = -real_tensor(P11) runs at HALF that combination; on
    torsion-free data dg_real/dt = -Rc/2, one quarter of the -2 Rc
    normalization.  All entropy clocks above account for this.
"""

# (1,1)-form coefficient of -(i/2) ddbar log det g
CHERN_RICCI_FACTOR = -0.5

# P11 = P11_COMBO_FACTOR * (S - Q1)
P11_COMBO_FACTOR = 0.5

# delta_real(w) = DSTAR_TO_CODIFF * (d*w from the coordinate formula)
DSTAR_TO_CODIFF = 2.0

# theta^{(0,1)} = LEE_SIGN * i * (delta_real w)^{(0,1)}
LEE_SIGN = +1.0

# |T3|^2_{g_real} = TORSION3_NORM_RATIO * tr_g Q1, pointwise
TORSION3_NORM_RATIO = 6.0

# |beta|^2 for a (0,1) form in the volume-rate identity
HERMITIAN_01_NORM_FACTOR = 2.0

# real flow tensor: dg_real/dt = -(1/GAUGE_TENSOR_FACTOR) * (the Riemannian
# combination -Rc + H/4 - Lie/2); equivalently that combination equals
# GAUGE_TENSOR_FACTOR * real_tensor(P11)
GAUGE_TENSOR_FACTOR = 2.0

# entropy clock rate dsigma/dt and conjugate-heat coefficients
# (the flow is 1/4 of the dg/dt = -2 Rc normalization on torsion-free data)
SIGMA_CLOCK_RATE = 0.25
CONJUGATE_HEAT_LAPLACE_COEFF = 0.25
CONJUGATE_HEAT_SCALAR_COEFF = 0.25

# coefficient of |T3|^2 in the energy density and of H in the flow
ENERGY_TORSION_COEFF = 1.0 / 12.0
FLOW_H_COEFF = 0.25


def sheet() -> dict:
    """All convention constants, for run manifests."""
    return {
        "omega": "i g_{i jbar} dz^i ^ dzbar^j",
        "g_real": "2 [[Re g, Im g], [-Im g, Re g]]",
        "dV": "det(g) dx dy",
        "chern_ricci_factor": CHERN_RICCI_FACTOR,
        "p11_combo_factor": P11_COMBO_FACTOR,
        "dstar_to_codiff": DSTAR_TO_CODIFF,
        "lee_sign": LEE_SIGN,
        "torsion3_norm_ratio": TORSION3_NORM_RATIO,
        "hermitian_01_norm_factor": HERMITIAN_01_NORM_FACTOR,
        "gauge_tensor_factor": GAUGE_TENSOR_FACTOR,
        "sigma_clock_rate": SIGMA_CLOCK_RATE,
        "conjugate_heat": "du/dt = -lap_b(u)/4 + R u/4",
        "energy_torsion_coeff": ENERGY_TORSION_COEFF,
        "flow_h_coeff": FLOW_H_COEFF,
    }
