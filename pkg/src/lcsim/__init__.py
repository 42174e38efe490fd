"""lcsim: linear-cluster-state measurement simulation and verification.

Modules:
  statevector  dense amplitude oracle (states, gates, projective measurement)
  symbolic     segment calculus with byproduct tracking and materialization
  ribbon       framed-ribbon surgeries, twist dictionary, diagrams
  verify       oracle harness grading every measurement case
  scripts      line-oriented measurement script parser
  session      coherent multi-view sessions with undo
  service      FastAPI HTTP/JSON session service
  cli          build | run | verify | serve | export
"""
from .statevector import (
    Outcome,
    PauliBasis,
    PureState,
    SchmidtSpectrum,
    apply_cz,
    apply_local,
    build_cluster,
    fidelity_mod_phase,
    outcome_probability,
    project_measure,
    sample_measure,
    schmidt_spectrum,
)
from .symbolic import (
    RuleTag,
    SymbolicState,
    absorb_byproduct,
    classify_target,
    materialize,
    new_chain,
    symbolic_measure,
    table_formula_state,
)
from .ribbon import (
    RibbonChainState,
    SurgeryEvent,
    SurgeryKind,
    TwistAngle,
    apply_surgery,
    compose_twists,
    correspondence_check,
    export_diagram,
    initial_chain,
    phase_to_twist,
    twist_to_phase,
)
from .session import Session, run_script
from .scripts import MeasurementScript, parse_script, print_script

__version__ = "0.1.0"
