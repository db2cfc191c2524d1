"""manakit: discrete Wigner functions, stabilizer polytopes, and magic
monotones for qudits of odd prime dimension."""

__version__ = "0.1.0"

from .system import PhasePoint, QuditSystem, symplectic_product
from .states import (
    DensityMatrix,
    basis_state,
    maximally_mixed,
    mix,
    partial_trace_last,
    pure_state,
    random_mixed,
    random_pure,
    tensor,
)
from .algebra import (
    CliffordUnitary,
    NotCliffordError,
    PauliOperator,
    clifford_generators,
    is_clifford,
    make_boost_shift,
    pauli,
    random_clifford,
    symplectic_twirl_qutrit,
)
from .wigner import (
    WignerFunction,
    clifford_covariance_check,
    phase_point_operator,
    reconstruct,
    trace_inner_product_check,
    wigner_of_povm_element,
    wigner_of_state,
)
from .stabilizer import (
    MembershipSolverError,
    PolytopeWitness,
    StabilizerPolytope,
    StabilizerVertex,
    enumerate_vertices,
    membership,
    p_t,
    vertex_count,
)
from .monotones import (
    MonotoneReport,
    RelEntResult,
    ancilla_equalizer,
    distillation_bound,
    mana,
    maxneg,
    rel_ent_magic,
    rel_ent_magic_twirl_closed_form,
    relative_entropy,
    report,
    subadditivity_witness,
    sum_negativity,
    wnorm,
)
from .protocols import (
    Branch,
    ClassicalMix,
    CliffordGate,
    ComposeStabilizer,
    MeasureLastQudit,
    OutcomeDistribution,
    ProtocolError,
    StabilizerProtocol,
    TraceLastQudit,
    monotone_audit,
    random_protocol,
    run,
)
from .extremal import (
    ExtremalSearchResult,
    asymptotic_continuity_demo,
    exhaustive_qutrit_search,
    mana_plane_grid,
    norrell_density,
    norrell_state,
    strange_density,
    strange_state,
)
