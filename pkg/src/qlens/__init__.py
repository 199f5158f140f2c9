"""Exact algebra and K-theory for quantum weighted lens spaces."""

from .gysin import (
    EulerInput,
    KKGroups,
    builtin_euler_cpn,
    check_rank_duality,
    fredholm_count,
    gysin_kgroups,
    wp_ktheory_predict,
)
from .lattice import FGAbelianGroup, IntMatrix, cokernel_group, kernel_group, matrix_power, snf
from .qsphere import Element, Monomial, degree, format_element, gen, normalize, parse, star
from .scalars import LaurentScalar, RationalScalar
from .weighted import (
    Frame,
    GradingWitness,
    WeightVector,
    big_m,
    frame_power,
    n_m,
    sharp,
    solve_witness,
    verify_frame,
    verify_grading_witness,
    wp_generators,
)

__version__ = "0.1.0"
