"""Soliton constructions for geometric flows by separation of variables.

Subpackages:

* cxgeom: Hermitian/symplectic kernels on C^n and the Lagrangian angle;
* immersion: finite-difference geometry of parametrized patches;
* kr_profile: Kahler-Ricci soliton profiles on the model cone, with
  pointwise verification of the soliton equation;
* initial_data: developing flows A(s) Sigma + a(s), constant-angle checks,
  twisted products and two-parameter sweeps;
* soliton_zoo: quadric solitons, flow traces, curve x Legendrian products
  and the least-squares soliton fitter;
* cli: the ``forge`` command line front end (scenario files, mesh export,
  run manifests).
"""

__version__ = "0.1.0"

from . import cxgeom, immersion, initial_data, kr_profile, sampling, soliton_zoo
from .cxgeom import cx_det, herm, lagrangian_angle, symp
from .immersion import Chart, geometry, geometry_at, jet, normal_project
from .kr_profile import (
    Profile,
    ProfileParams,
    SasakiModel,
    calabi_yau_params,
    cone_metric_at,
    profile_diagnostics,
    profile_to_potential,
    ricci_form_at,
    solve_profile_closed,
    solve_profile_numeric,
    soliton_residual,
)
from .initial_data import (
    InitialData,
    angle_formula_check,
    check_constant_angle,
    check_initial_data,
    check_quadric_legendrian,
    develop,
    develop_special_lagrangian,
    develop_two_param,
    developed_chart,
    quadric_data,
    sphere_data,
    twisted_product,
)
from .soliton_zoo import (
    QuadricSpec,
    build_curve_times_legendrian,
    build_quadric_lagrangian,
    fit_soliton,
    flow_trace,
    legendrian_catalog,
)
