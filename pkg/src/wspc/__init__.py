"""Windows scheduling and partial coding: instances, verifiers, reductions and small exact solvers."""

from .errors import DocumentError, InvalidArgument, ResourceLimit, ValidationError, WspcError
from .instances import Coloring, Encoding, Graph, Job, PcInstance, Schedule, WsInstance, density, generate
from .numtheory import (
    Factorization,
    RelPrimeVector,
    base_m_representation,
    from_residue_vector,
    relative_prime_factorization,
    residue_vector,
    split,
)
from .reduce import (
    Certificate,
    bpc_to_ws,
    clique_cover_reduction,
    coloring_to_pc,
    densify_inexact,
    independent_set_to_kary_pc,
    multimachine_to_single,
    pc_to_bpc,
    pc_to_ws,
    run_reduction,
    ws_to_pc,
)
from .solve import solve_coloring, solve_pc, solve_ws_exact, solve_ws_inexact
from .verify import Verdict, timeline_oracle, verify_encoding, verify_schedule

__version__ = "0.1.0"
