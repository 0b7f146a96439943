"""Second-order shape calculus: the covariant derivative of normal fields,
shape Hessian bilinear forms, solvable Hessian operators, and a probe for
the quadratic Taylor model.

Two Hessian forms are implemented for volume functionals.  The repeated
shape derivative ("standard" form) depends on how the perturbation fields
are extended off the boundary and is not symmetric in its two arguments.
The Riemannian form obtained by differentiating the gradient covariantly,

    hess(alpha, beta) = sum [ dpsi_dn + (kappa/2) psi
                              - A kappa^3 psi / (1 + A kappa^2) ] alpha beta w
                        - sum psi A kappa (alpha beta)_tautau w,

needs no extension data and is symmetric exactly: the discrete integrand
depends on the two fields only through the pointwise product alpha*beta.

At a curve where psi vanishes on the boundary the form collapses to
multiplication by nu = dpsi_dn, which for the quadratic objective is the
explicit field nu = 2 (x1 n1 + mu^2 x2 n2); ``hessian_at_solution`` builds
that operator along any iterate, and ``solve_hessian`` inverts either
representation to produce Newton steps.
"""

import numpy as np

from .curve import as_field, retract, tangential_second_derivative
from .errors import ShapeOptError, SingularHessian
from .functional import boundary_kernel, evaluate_general
from .metric import as_params, inner, metric_weight, riesz_gradient


def covariant_derivative(c, A, alpha, beta, dbeta_dn):
    """Covariant derivative of the normal field beta along alpha.

    With kappa the curvature and A the metric parameter,

        nabla_alpha beta = (dbeta/dn) alpha
                           + (1/2)(kappa + 2 A kappa^3/(1+A kappa^2)) alpha beta
                           + A kappa (alpha beta)_tautau.

    The normal derivative dbeta_dn of an extension of beta is the
    caller's to supply; it is the only extension-dependent ingredient,
    and the Hessian forms below are arranged so they never need it.
    """
    A = as_params(A).A
    alpha = as_field(c, alpha, "alpha")
    beta = as_field(c, beta, "beta")
    dbeta_dn = as_field(c, dbeta_dn, "dbeta_dn")
    kappa = c.geometry.curvature
    mid = 0.5 * (kappa + 2.0 * A * kappa ** 3 / (1.0 + A * kappa ** 2))
    return dbeta_dn * alpha + mid * alpha * beta \
        + A * kappa * tangential_second_derivative(c, alpha * beta)


def standard_shape_hessian_form(c, psi_kernels, alpha, beta, dW_normal):
    """Repeated shape derivative of a volume functional.

    psi_kernels is the pair (psi, dpsi_dn) on the nodes, as returned by
    ``functional.boundary_kernel``; dW_normal supplies the per-node value
    <DW V, n> of the chosen extension of the perturbation fields.  The
    result is

        sum (dpsi_dn + kappa psi) alpha beta w  +  sum psi dW_normal w,

    which is generally not symmetric under swapping the two fields: the
    asymmetry sits in the extension term that the covariant form removes.
    """
    g, dpsi_dn = psi_kernels
    alpha = as_field(c, alpha, "alpha")
    beta = as_field(c, beta, "beta")
    dW_normal = as_field(c, dW_normal, "dW_normal")
    geo = c.geometry
    return float(np.sum(((dpsi_dn + geo.curvature * g) * alpha * beta
                         + g * dW_normal) * geo.weights))


def riemannian_hessian_form(c, A, psi_kernels, alpha, beta):
    """Covariant (extension-free) Hessian form of a volume functional.

    Symmetric in (alpha, beta) to the last bit: the product field
    alpha*beta is formed once and every term acts on it.
    """
    A = as_params(A).A
    g, dpsi_dn = psi_kernels
    alpha = as_field(c, alpha, "alpha")
    beta = as_field(c, beta, "beta")
    geo = c.geometry
    kappa = geo.curvature
    prod = alpha * beta
    coeff = dpsi_dn + 0.5 * kappa * g - A * kappa ** 3 * g / (1.0 + A * kappa ** 2)
    second = g * A * kappa * tangential_second_derivative(c, prod)
    return float(np.sum((coeff * prod - second) * geo.weights))


class HessianOperator:
    """A solvable representation of the shape Hessian at a curve.

    kind "multiplication": pointwise scaling by a field nu, valid where
    the boundary kernel psi vanishes (stationary shapes, and a useful
    surrogate along the way).  kind "general-form": the full bilinear
    form, held as curve + metric parameter + (psi, dpsi_dn) kernels and
    assembled into a matrix on demand.
    """

    MULTIPLICATION = "multiplication"
    GENERAL_FORM = "general-form"

    def __init__(self, kind, curve, nu=None, params=None, psi_kernels=None):
        self.kind = kind
        self.curve = curve
        self.nu = nu
        self.params = params
        self.psi_kernels = psi_kernels
        self._matrix = None

    @classmethod
    def multiplication(cls, curve, nu):
        nu = as_field(curve, nu, "nu")
        return cls(cls.MULTIPLICATION, curve, nu=nu)

    @classmethod
    def general_form(cls, curve, params, psi_kernels):
        g = as_field(curve, psi_kernels[0], "psi")
        dpsi_dn = as_field(curve, psi_kernels[1], "dpsi_dn")
        return cls(cls.GENERAL_FORM, curve, params=as_params(params),
                   psi_kernels=(g, dpsi_dn))

    @property
    def matrix(self):
        if self._matrix is None:
            if self.kind != self.GENERAL_FORM:
                raise ShapeOptError("matrix assembly applies to the general form only")
            self._matrix = _assemble_general_form(self)
        return self._matrix


def hessian_at_solution(c, mu):
    """Multiplication-operator Hessian of the quadratic objective.

    nu_i = 2 (x1 n1 + mu^2 x2 n2) at node i, evaluated with the curve's
    own normals.  On the optimal ellipse this equals 2 sqrt(s1^2 +
    mu^4 s2^2) and ranges over [2, 2 mu]; along other iterates it serves
    as the Newton surrogate that becomes exact in the limit.
    """
    mu = float(mu)
    n = c.geometry.normal
    nu = 2.0 * (c.nodes[:, 0] * n[:, 0] + mu ** 2 * c.nodes[:, 1] * n[:, 1])
    return HessianOperator.multiplication(c, nu)


def _assemble_general_form(H):
    """Matrix of the covariant Hessian form in the nodal basis.

    For nodal indicator fields e_j the pointwise product e_j * e_k
    vanishes unless j = k, and the discrete form acts on fields only
    through that product, so the matrix is diagonal:

        M_jj = coeff_j w_j - (S^T E)_j,   E_i = (psi A kappa w)_i,

    with S the second-difference stencil of tangential_second_derivative
    and coeff the pointwise factor of riemannian_hessian_form.  A few
    entries are cross-checked against the quadrature form itself, and the
    result is symmetrized with the pre-averaging asymmetry asserted.
    """
    c = H.curve
    A = H.params.A
    g, dpsi_dn = H.psi_kernels
    geo = c.geometry
    kappa, w = geo.curvature, geo.weights
    coeff = dpsi_dn + 0.5 * kappa * g - A * kappa ** 3 * g / (1.0 + A * kappa ** 2)

    # transpose of the second-difference stencil applied to E
    dp = np.linalg.norm(np.roll(c.nodes, -1, axis=0) - c.nodes, axis=1)
    dm = np.roll(dp, 1)
    cm = 2.0 / (dm * (dm + dp))
    c0 = -2.0 / (dm * dp)
    cp = 2.0 / (dp * (dm + dp))
    E = g * A * kappa * w
    st_e = np.roll(E * cm, -1) + E * c0 + np.roll(E * cp, 1)

    M = np.diag(coeff * w - st_e)

    n = c.n_nodes
    scale = 1.0 + float(np.max(np.abs(M)))
    basis = np.eye(n)
    for j, k in ((0, 0), (0, 1), (1, 0), (n // 2, n // 2), (n // 2, n // 2 + 1), (2, n - 1)):
        ref = riemannian_hessian_form(c, H.params, H.psi_kernels, basis[j], basis[k])
        if abs(M[j, k] - ref) > 1e-10 * scale:
            raise ShapeOptError(
                f"general-form assembly disagrees with the quadrature form at "
                f"({j}, {k}): {M[j, k]!r} vs {ref!r}")
    asym = float(np.max(np.abs(M - M.T)))
    if asym > 1e-12 * scale:
        raise ShapeOptError(f"general-form matrix asymmetry {asym:.3e} exceeds tolerance")
    return 0.5 * (M + M.T)


def solve_hessian(H, rhs, A=None):
    """Solve H delta = rhs for a Newton step.

    rhs is a tangent field (typically the Riesz gradient).  For the
    multiplication kind the solve is pointwise division by nu.  For the
    general form, rhs is first paired with the nodal basis through the
    metric (mass weights (1 + A kappa^2) w), then the dense symmetric
    system is solved; A defaults to the operator's own metric parameter.
    Raises SingularHessian when nu has a (near-)zero entry or the
    assembled matrix is (near-)singular.
    """
    rhs = as_field(H.curve, rhs, "rhs")
    if H.kind == HessianOperator.MULTIPLICATION:
        small = np.min(np.abs(H.nu))
        if small <= 1e-12:
            raise SingularHessian(f"multiplication factor has min |nu| = {small:.3e}")
        return rhs / H.nu
    params = H.params if A is None else as_params(A)
    M = H.matrix
    b = metric_weight(H.curve, params) * H.curve.geometry.weights * rhs
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularHessian(f"general-form matrix condition number {cond:.3e}")
    try:
        return np.linalg.solve(M, b)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(str(exc)) from exc


def taylor_remainder_probe(f, c, A, h, t_list):
    """Remainders of the quadratic model of f along the normal field h.

    For each t the curve is retracted by t*h (nodes moved along their
    normals) and

        remainder(t) = | f(c_t) - f(c) - t G(grad f, h)
                         - (t^2/2) hess(h, h) |

    is returned as a list of (t, remainder) pairs.  All values of f use
    the fan quadrature so model and value share one discretization.  At a
    stationary shape the remainder decays cubically in t; away from
    stationarity the straight-line retraction feeds the gradient into the
    second-order term (the connection correction), so cubic decay should
    only be expected where the boundary kernel vanishes.  Raises
    ShapeDegenerate if a probed polygon leaves the admissible set.
    """
    h = as_field(c, h, "h")
    g, dpsi_dn = boundary_kernel(c, f)
    grad = riesz_gradient(c, A, g)
    slope = inner(c, A, grad, h)
    curv = riemannian_hessian_form(c, A, (g, dpsi_dn), h, h)
    f0 = evaluate_general(c, f)
    out = []
    for t in t_list:
        t = float(t)
        ft = evaluate_general(retract(c, h, t), f)
        out.append((t, abs(ft - f0 - t * slope - 0.5 * t * t * curv)))
    return out
