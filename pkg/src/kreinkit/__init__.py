"""Self-adjoint extensions of restricted operators via Krein-type resolvents."""
from .errors import *  # noqa: F401,F403
from .models import (
    DiagonalModel,
    GammaMatrix,
    KernelField,
    PointModel3D,
    ReferencePoint,
    free_green_eval,
    g_apply,
    g_breve_apply,
    gamma_matrix,
    l2_inner,
    load_model,
    resolvent_apply,
    trace_apply,
)
from .extension import (
    DecomposedState,
    KreinExtension,
    ThetaParam,
    additive_apply,
    apply_extension,
    boundary_check,
    charge_of,
    decompose,
    decompose_resolvent,
    inverse_apply,
    krein_resolvent_apply,
    reference_shift,
    reference_unshift,
    v_theta_apply,
    v_theta_pairing,
)
from .bridge import (
    ReducedUnitary,
    cayley_check,
    gamma_i,
    gamma_sqrt,
    theta_to_w,
    w_inverse,
    w_to_theta,
)
from .spectrum import (
    EigenResult,
    boundary_certificate,
    eigenfunction_eval,
    find_point_spectrum,
    krein_eigencurves,
)
from .kernels import BACKEND

__version__ = "0.1.0"
