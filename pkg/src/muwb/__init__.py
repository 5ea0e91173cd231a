"""muwb: a mu-calculus workbench.

Syntax with positivity checking, denotational model checking over
finite transition systems, a natural-deduction proof kernel, an
interactive goal-directed session engine, a batch CLI and a session
protocol server for browser frontends.
"""

from .kernel import Derivation, KernelError, Sequent, check, sequent
from .parser import (
    ParseError,
    ProofScript,
    SourceSpan,
    UndeclaredState,
    parse_formula,
    parse_model,
    parse_script,
    parse_scripts,
    parse_sequent,
    parse_tactic,
    print_formula,
    print_sequent,
)
from .semantics import (
    BoundExceeded,
    IllFormed,
    TransitionSystem,
    check_antimonotone,
    check_monotone,
    consequence,
    counterexample,
    eval_mu_oracle,
    evaluate,
    semantic_function,
)
from .session import (
    GoalState,
    ProofSession,
    ReplayError,
    SessionError,
    TacticError,
    applicable,
    apply_tactic,
    new_session,
    qed,
    replay,
)
from .syntax import (
    ActionId,
    Atom,
    AtomicId,
    Box,
    Ff,
    Imp,
    Mu,
    Not,
    Preformula,
    Var,
    Variable,
    WellFormednessError,
    WfFormula,
    alpha_eq,
    free_vars,
    fresh,
    is_in,
    is_wf,
    mk_wf,
    neg_in,
    not_in,
    nu,
    pos_in,
    subst,
)

__version__ = "0.1.0"
